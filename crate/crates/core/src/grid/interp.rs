use super::GridField;
use crate::error::{Error, Result};

/// Multilinear interpolation of every component of `f` at `x`.
///
/// Points outside the node hull are rejected; no extrapolation is done.
pub fn interpolate<const D: usize, F: GridField<D>>(f: &F, x: &[f64; D]) -> Result<Vec<f64>> {
    let spec = f.spec();
    let shape = spec.shape();
    let mut base = [0usize; D];
    let mut frac = [0.0; D];
    for a in 0..D {
        let t = (x[a] - spec.origin()[a]) / spec.spacing()[a];
        let last = (shape[a] - 1) as f64;
        if !(t >= -1e-12 && t <= last + 1e-12) {
            return Err(Error::OutOfDomain(x.to_vec()));
        }
        let t = t.clamp(0.0, last);
        let i = (t.floor() as usize).min(shape[a] - 2);
        base[a] = i;
        frac[a] = t - i as f64;
    }
    let c = F::components_per_node();
    let mut out = vec![0.0; c];
    for corner in 0..(1usize << D) {
        let mut w = 1.0;
        let mut idx = base;
        for a in 0..D {
            if corner >> a & 1 == 1 {
                idx[a] += 1;
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if w == 0.0 {
            continue;
        }
        let node = f.node(spec.linear(&idx));
        for (o, v) in out.iter_mut().zip(node) {
            *o += w * v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, ScalarField, VectorField};

    #[test]
    fn reproduces_node_values() {
        let g = GridSpec::<2>::cell_centered(8, 0.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x| (x[0] * 7.0).sin() + x[1] * x[1]).unwrap();
        for k in [0, 9, 33, 63] {
            let x = g.point_linear(k);
            assert_eq!(interpolate(&f, &x).unwrap()[0], f.values()[k]);
        }
    }

    #[test]
    fn exact_for_affine_fields() {
        let g = GridSpec::<3>::cell_centered(6, -1.0, 1.0).unwrap();
        let v = VectorField::from_fn(g, |x| [1.0 + 2.0 * x[0] - x[2], 3.0 * x[1], x[0] + x[1] + x[2]]).unwrap();
        let p = [0.123, -0.41, 0.27];
        let got = interpolate(&v, &p).unwrap();
        let exact = [1.0 + 2.0 * p[0] - p[2], 3.0 * p[1], p[0] + p[1] + p[2]];
        for a in 0..3 {
            assert!((got[a] - exact[a]).abs() < 1e-13);
        }
    }

    #[test]
    fn smooth_field_converges_at_second_order() {
        let err = |n: usize| {
            let g = GridSpec::<2>::cell_centered(n, 0.0, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos()).unwrap();
            let mut e: f64 = 0.0;
            for s in 0..50 {
                let p = [0.1 + 0.016 * s as f64, 0.83 - 0.013 * s as f64];
                let v = interpolate(&f, &p).unwrap()[0];
                e = e.max((v - (3.0 * p[0]).sin() * (2.0 * p[1]).cos()).abs());
            }
            e
        };
        let ratio = err(32) / err(64);
        assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_points_outside() {
        let g = GridSpec::<2>::cell_centered(8, 0.0, 1.0).unwrap();
        let f = ScalarField::constant(g, 1.0).unwrap();
        assert!(interpolate(&f, &[0.01, 0.5]).is_err());
    }
}
