//! The four integrals whose sum represents the pressure on `W`.

use super::aux::{AuxSolver, SourceRamp};
use super::ramp::{auto_ramp_order, RampQuadrature};
use crate::error::{Error, Result};
use crate::grid::{divergence_fd, GridField, GridSpec, ScalarField, TensorField, Window};
use crate::kernels::{cz_kernel, potential_radial, sphere_area, Cutoff};
use crate::singular_integral::{pv_convolve_many, Kernel, PvConfig};
use rayon::prelude::*;

/// How the third integral pairs `f` with the auxiliary fields `v_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum I3Form {
    /// `-sum div f . v_x`, which needs no boundary data on `v_x`.
    #[default]
    DivergencePairing,
    /// `sum f : grad v_x`, the form obtained after a second integration by parts.
    Contraction,
}

/// Checks `W` strictly inside `V` strictly inside the grid, and that the
/// cutoff is identically one with vanishing derivatives on `W`.
pub(crate) fn check_geometry<const D: usize>(
    spec: &GridSpec<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
) -> Result<()> {
    v.check_interior(spec, 1)?;
    w.check_within(spec)?;
    if !w.inside(v, 1) {
        return Err(Error::InvalidWindow(format!("W {w:?} must sit strictly inside V {v:?}")));
    }
    for idx in [w.lo, std::array::from_fn(|a| w.hi[a] - 1)] {
        let x = spec.point(&idx);
        if cutoff.eval(&x) != 1.0 || !cutoff.is_flat(&x) {
            return Err(Error::InvalidArgument(format!("cutoff is not flat and equal to one at {x:?}")));
        }
    }
    Ok(())
}

/// `(I11, I2)` at every node of `W`; both integrands live on the ramp.
pub(crate) fn annulus_terms<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
    order: usize,
) -> Result<(ScalarField<D>, ScalarField<D>)> {
    let spec = f.spec();
    let quad = RampQuadrature::new(spec, cutoff, v, order);
    let comps: Vec<Vec<f64>> =
        (0..D * D).map(|c| v.indices().map(|idx| f.data()[spec.linear(&idx) * D * D + c]).collect()).collect();
    // Per point: weighted `f : H`, `f^T grad eta` and `f grad eta`.
    let contracted: Vec<(f64, [f64; D], [f64; D])> = (0..quad.points.len())
        .map(|k| {
            let p = &quad.points[k];
            let fy: [[f64; D]; D] =
                std::array::from_fn(|i| std::array::from_fn(|j| quad.interpolate(k, &comps[i * D + j])));
            let fh =
                (0..D).flat_map(|i| (0..D).map(move |j| (i, j))).map(|(i, j)| fy[i][j] * p.hess[i][j]).sum::<f64>();
            let left = std::array::from_fn(|j| p.weight * (0..D).map(|i| fy[i][j] * p.grad[i]).sum::<f64>());
            let right = std::array::from_fn(|i| p.weight * (0..D).map(|j| fy[i][j] * p.grad[j]).sum::<f64>());
            (p.weight * fh, left, right)
        })
        .collect();
    let omega = sphere_area(D);
    let points: Vec<[usize; D]> = w.indices().collect();
    let pairs: Vec<(f64, f64)> = points
        .par_iter()
        .map(|idx| {
            let x = spec.point(idx);
            let (mut i11, mut i2) = (0.0, 0.0);
            for (p, (fh, left, right)) in quad.points.iter().zip(&contracted) {
                let r: [f64; D] = std::array::from_fn(|a| p.y[a] - x[a]);
                let rn = r.iter().map(|c| c * c).sum::<f64>().sqrt();
                let phi = potential_radial(D, rn);
                let c = 1.0 / (omega * rn.powi(D as i32));
                let gr = c * (0..D).map(|a| left[a] * r[a]).sum::<f64>();
                let rg = c * (0..D).map(|a| right[a] * r[a]).sum::<f64>();
                i11 += phi * fh - gr - rg;
                i2 -= phi * fh - gr;
            }
            (i11, i2)
        })
        .collect();
    let sub = spec.subgrid(w)?;
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok((ScalarField::from_raw(sub.clone(), a)?, ScalarField::from_raw(sub, b)?))
}

/// `I11(x) = int f : (Phi(x - y) grad^2 eta - (grad eta (x) r + r (x) grad eta) / (omega_n |r|^n))`
/// with `r = y - x`, on the subgrid of `W`.
pub fn assemble_i11<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
) -> Result<ScalarField<D>> {
    check_geometry(f.spec(), cutoff, w, v)?;
    Ok(annulus_terms(f, cutoff, w, v, auto_ramp_order(f.spec(), cutoff))?.0)
}

/// `I2(x) = -int f : (Phi(x - y) grad^2 eta - grad eta (x) r / (omega_n |r|^n))`,
/// where `(a (x) b)_ij = a_i b_j` pairs with `f^i_j`.
pub fn assemble_i2<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
) -> Result<ScalarField<D>> {
    check_geometry(f.spec(), cutoff, w, v)?;
    Ok(annulus_terms(f, cutoff, w, v, auto_ramp_order(f.spec(), cutoff))?.1)
}

/// `I12(x) = -(1/omega_n) sum_ij PV int eta f^i_j Omega_ij(y - x) / |y - x|^n dy`.
pub fn assemble_i12<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
    cfg: &PvConfig,
) -> Result<ScalarField<D>> {
    let spec = f.spec();
    check_geometry(spec, cutoff, w, v)?;
    let eta = ScalarField::from_fn(spec.clone(), |x| cutoff.eval(x))?;
    type Omega<const D: usize> = Box<dyn Fn(&[f64; D]) -> f64 + Sync>;
    let mut kernels: Vec<Omega<D>> = Vec::new();
    let mut sources = Vec::new();
    for i in 0..D {
        for j in i..D {
            // Omega is symmetric, so the (i, j) and (j, i) entries share a kernel.
            let mut g = f.component(i, j);
            if i != j {
                g = g.axpby(1.0, &f.component(j, i), 1.0)?;
            }
            let g =
                ScalarField::from_raw(spec.clone(), g.values().iter().zip(eta.values()).map(|(a, b)| a * b).collect())?;
            kernels.push(Box::new(move |y: &[f64; D]| cz_kernel(i, j, y).unwrap_or(0.0)));
            sources.push(g);
        }
    }
    let terms: Vec<(Kernel<'_, D>, &ScalarField<D>)> =
        kernels.iter().zip(&sources).map(|(k, g)| (&**k as Kernel<'_, D>, g)).collect();
    let t = pv_convolve_many(&terms, w, cfg)?;
    Ok(t.scale(-1.0 / sphere_area(D)))
}

/// Component arrays of a vector field restricted to `V`.
fn components_on<const D: usize>(data: &[f64], spec: &GridSpec<D>, v: &Window<D>) -> Vec<Vec<f64>> {
    (0..D).map(|a| v.indices().map(|idx| data[spec.linear(&idx) * D + a]).collect()).collect()
}

/// `I3(x)` on the subgrid of `W`, pairing `f` with the auxiliary fields
/// `v_x` solving `div v_x = Laplace eta Phi(x - .) - mean` on `V`.
///
/// All `v_x` share the operator `D D^T`, so the pairing is evaluated in
/// adjoint form: one pseudo-inverse solve for `psi = (D D^T)^+ D b`, then
/// `<b, v_x> = <psi, g_x - mean(g_x)>` for every `x`.
pub fn assemble_i3<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
    form: I3Form,
) -> Result<ScalarField<D>> {
    check_geometry(f.spec(), cutoff, w, v)?;
    i3_with_order(f, cutoff, w, v, form, auto_ramp_order(f.spec(), cutoff))
}

pub(crate) fn i3_with_order<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
    form: I3Form,
    order: usize,
) -> Result<ScalarField<D>> {
    let spec = f.spec();
    let solver = AuxSolver::new(&spec.subgrid(v)?)?;
    let (b, sign) = match form {
        I3Form::DivergencePairing => {
            let div = divergence_fd(f)?;
            (components_on(div.data(), spec, v), -1.0)
        }
        I3Form::Contraction => {
            // sum_ij <f^i_j, G_j v_i> = sum_i <sum_j G_j^T f^i_j, v_i>.
            let c = (0..D)
                .map(|i| {
                    let mut acc = vec![0.0; v.len()];
                    for j in 0..D {
                        let fij: Vec<f64> =
                            v.indices().map(|idx| f.data()[spec.linear(&idx) * D * D + i * D + j]).collect();
                        for (s, t) in acc.iter_mut().zip(solver.derivative_transpose(&fij, j)) {
                            *s += t;
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>();
            (c, 1.0)
        }
    };
    let psi = solver.apply_pinv(&solver.apply_divergence(&b));
    let psi_sum: f64 = psi.iter().sum();
    let nv = v.len() as f64;
    let quad = RampQuadrature::new(spec, cutoff, v, order);
    let psi_at: Vec<f64> = (0..quad.points.len()).map(|k| quad.interpolate(k, &psi)).collect();
    let ramp = SourceRamp::new(&quad, spec, v);
    let points: Vec<[usize; D]> = w.indices().collect();
    let vals = points
        .par_iter()
        .map(|idx| {
            let (total, pair) = ramp.pair(&spec.point(idx), &psi_at)?;
            Ok(sign * (pair - total / nv * psi_sum))
        })
        .collect::<Result<Vec<f64>>>()?;
    ScalarField::from_raw(spec.subgrid(w)?, vals)
}
