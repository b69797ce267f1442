use super::lattice::Correlator;
use crate::error::Result;
use crate::grid::{GridField, ScalarField, Window};
use crate::kernels::{gauss_legendre, potential_radial};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Offsets (max norm) whose cell integral of `Phi` is computed by Gauss
/// quadrature rather than the midpoint rule.
const NEAR: isize = 2;

/// `int_{cell} Phi(y) dy` over the grid cell centred at the origin, where the
/// integrand is singular. Each face of the cell spans a triangle (pyramid in
/// 3D) with apex at the origin, on which the radial integral is exact.
pub fn center_cell_potential<const D: usize>(spacing: &[f64; D]) -> f64 {
    let mut total = 0.0;
    if D == 2 {
        // int log(d^2 + u^2) du = u log(d^2 + u^2) - 2u + 2d atan(u/d)
        let anti = |d: f64, u: f64| u * (d * d + u * u).ln() - 2.0 * u + 2.0 * d * (u / d).atan();
        for a in 0..2 {
            let d = 0.5 * spacing[a];
            let b = 0.5 * spacing[1 - a];
            let log_part = anti(d, b) - anti(d, -b);
            let tri = d * (0.25 * log_part - 0.25 * 2.0 * b);
            total += 2.0 * tri;
        }
        -total / (2.0 * PI)
    } else {
        let (x, w) = gauss_legendre(48);
        for a in 0..3 {
            let d = 0.5 * spacing[a];
            let t = [(a + 1) % 3, (a + 2) % 3];
            let (bu, bw) = (0.5 * spacing[t[0]], 0.5 * spacing[t[1]]);
            // inner integral over w is 2 asinh(bw / sqrt(d^2 + u^2))
            let mut face = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let u = bu * xi;
                face += wi * bu * 2.0 * (bw / (d * d + u * u).sqrt()).asinh();
            }
            total += 2.0 * 0.5 * d * face;
        }
        total / (4.0 * PI)
    }
}

fn near_cell_potential<const D: usize>(o: &[isize; D], h: &[f64; D]) -> f64 {
    let m = 8;
    let (x, w) = gauss_legendre(m);
    let count = m.pow(D as u32);
    let mut s = 0.0;
    for mut k in 0..count {
        let mut y = [0.0; D];
        let mut wt = 1.0;
        for a in (0..D).rev() {
            let i = k % m;
            k /= m;
            y[a] = (o[a] as f64 + 0.5 * x[i]) * h[a];
            wt *= 0.5 * h[a] * w[i];
        }
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        s += wt * potential_radial(D, r);
    }
    s
}

/// `x -> int Phi(x - y) g(y) dy` on the nodes of `eval`, with `g` treated as
/// piecewise constant on cells. Cells near the diagonal are integrated
/// accurately; the rest use the midpoint rule.
pub fn convolve_potential<const D: usize>(g: &ScalarField<D>, eval: &Window<D>) -> Result<ScalarField<D>> {
    let spec = g.spec();
    let out_spec = spec.subgrid(eval)?;
    let h = spec.spacing();
    let dv = spec.cell_volume();
    let center = center_cell_potential(&h);
    let corr = Correlator::new(spec, eval, &[g], |o, out| {
        out[0] = if o.iter().all(|&c| c == 0) {
            center
        } else if o.iter().all(|c| c.abs() <= NEAR) {
            near_cell_potential(o, &h)
        } else {
            let r = (0..D).map(|a| (o[a] as f64 * h[a]).powi(2)).sum::<f64>().sqrt();
            potential_radial(D, r) * dv
        };
    });
    let Some(corr) = corr else {
        return Ok(ScalarField::zeros(out_spec));
    };
    let points: Vec<[usize; D]> = eval.indices().collect();
    let data = points.par_iter().map(|x| corr.at(x)).collect();
    ScalarField::from_raw(out_spec, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fine_average<const D: usize>(h: &[f64; D], n: usize) -> f64 {
        // Midpoint oracle on an even subdivision, which never samples the origin.
        let count = n.pow(D as u32);
        let mut s = 0.0;
        for mut k in 0..count {
            let mut y = [0.0; D];
            for a in (0..D).rev() {
                let i = k % n;
                k /= n;
                y[a] = (-0.5 + (i as f64 + 0.5) / n as f64) * h[a];
            }
            s += potential_radial(D, y.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
        s * h.iter().product::<f64>() / count as f64
    }

    #[test]
    fn center_cell_matches_fine_midpoint() {
        let h2 = [0.1, 0.07];
        let exact = center_cell_potential(&h2);
        let oracle = fine_average(&h2, 2000);
        assert!((exact - oracle).abs() < 1e-6 * exact.abs(), "{exact} vs {oracle}");
        let h3 = [0.1, 0.1, 0.1];
        let exact = center_cell_potential(&h3);
        let oracle = fine_average(&h3, 200);
        assert!((exact - oracle).abs() < 1e-3 * exact.abs(), "{exact} vs {oracle}");
    }

    #[test]
    fn unit_square_closed_form() {
        // int_{[0,1]^2} log(x^2 + y^2) = log 2 - 3 + pi/2, rescaled to the
        // centred unit cell: int log|y| = (pi/2 - 3 - log 2) / 2.
        let log_integral = (0.5 * PI - 3.0 - 2.0_f64.ln()) / 2.0;
        let exact = center_cell_potential(&[1.0, 1.0]);
        assert!((exact + log_integral / (2.0 * PI)).abs() < 1e-14);
    }
}
