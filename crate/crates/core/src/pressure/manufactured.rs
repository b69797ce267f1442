//! Manufactured pairs `(q*, f)` with `div f = grad q*` in closed form.

use crate::error::Result;
use crate::grid::{GridField, GridSpec, ScalarField, TensorField, Window};
use crate::kernels::Cutoff;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct ManufacturedCase<const D: usize> {
    pub f: TensorField<D>,
    /// The exact pressure, up to a constant, on the full grid.
    pub q_star: ScalarField<D>,
}

/// Smooth mask equal to one on `W` and supported inside `V`.
pub fn mask<const D: usize>(spec: &GridSpec<D>, w: &Window<D>, v: &Window<D>) -> Result<Cutoff<D>> {
    Cutoff::new(spec, w, v, 0.9)
}

/// `q*(x) = prod_a sin(2 pi x_a)` times the mask.
pub fn masked_sine<const D: usize>(spec: &GridSpec<D>, w: &Window<D>, v: &Window<D>) -> Result<ScalarField<D>> {
    let m = mask(spec, w, v)?;
    ScalarField::from_fn(spec.clone(), |x| m.eval(x) * (0..D).map(|a| (2.0 * PI * x[a]).sin()).product::<f64>())
}

/// `f = q* Id`.
pub fn isotropic<const D: usize>(spec: &GridSpec<D>, w: &Window<D>, v: &Window<D>) -> Result<ManufacturedCase<D>> {
    let q_star = masked_sine(spec, w, v)?;
    Ok(ManufacturedCase { f: TensorField::isotropic(&q_star), q_star })
}

/// Value, gradient and Hessian of `mask * p` with
/// `p = s cos(2 pi x_1) cos(4 pi x_2)`.
fn stream_jet(m: &Cutoff<2>, s: f64, x: &[f64; 2]) -> (f64, [f64; 2], [[f64; 2]; 2]) {
    let (k1, k2) = (2.0 * PI, 4.0 * PI);
    let (c1, s1) = ((k1 * x[0]).cos(), (k1 * x[0]).sin());
    let (c2, s2) = ((k2 * x[1]).cos(), (k2 * x[1]).sin());
    let p = s * c1 * c2;
    let dp = [-s * k1 * s1 * c2, -s * k2 * c1 * s2];
    let hp = [[-k1 * k1 * p, s * k1 * k2 * s1 * s2], [s * k1 * k2 * s1 * s2, -k2 * k2 * p]];
    let (mv, dm, hm) = m.jet(x);
    let grad = [mv * dp[0] + p * dm[0], mv * dp[1] + p * dm[1]];
    let mut hess = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            hess[i][j] = mv * hp[i][j] + dm[i] * dp[j] + dp[i] * dm[j] + p * hm[i][j];
        }
    }
    (mv * p, grad, hess)
}

/// `f = q* Id + sigma`, where `sigma` is the Airy stress of a compactly
/// supported potential `phi`: symmetric, divergence free and with nonzero
/// off-diagonal entries.
pub fn airy(spec: &GridSpec<2>, w: &Window<2>, v: &Window<2>, strength: f64) -> Result<ManufacturedCase<2>> {
    let q_star = masked_sine(spec, w, v)?;
    let m = mask(spec, w, v)?;
    let f = TensorField::from_fn(spec.clone(), |x| {
        let q = m.eval(x) * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin();
        let (_, _, h) = stream_jet(&m, strength, x);
        [[q + h[1][1], -h[0][1]], [-h[1][0], q + h[0][0]]]
    })?;
    Ok(ManufacturedCase { f, q_star })
}

/// `f = q* Id + N` with `N` non-symmetric: its first row is the rotated
/// gradient `(d_2 a, -d_1 a)` of a compactly supported `a`, its second row
/// vanishes, so every row of `N` is divergence free.
pub fn rotated_row(spec: &GridSpec<2>, w: &Window<2>, v: &Window<2>, strength: f64) -> Result<ManufacturedCase<2>> {
    let q_star = masked_sine(spec, w, v)?;
    let m = mask(spec, w, v)?;
    let f = TensorField::from_fn(spec.clone(), |x| {
        let q = m.eval(x) * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).sin();
        let (_, g, _) = stream_jet(&m, strength, x);
        [[q + g[1], -g[0]], [0.0, q]]
    })?;
    Ok(ManufacturedCase { f, q_star })
}

/// Relative L2(W) error after removing the mean of both fields on `W`.
/// `q` lives on the subgrid of `W`; `q_star` on the full grid.
pub fn gauge_aligned_error<const D: usize>(q: &ScalarField<D>, q_star: &ScalarField<D>, w: &Window<D>) -> Result<f64> {
    let exact = q_star.restrict(w)?;
    exact.spec().same_as(q.spec())?;
    let (me, mq) = (exact.mean(), q.mean());
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in q.values().iter().zip(exact.values()) {
        num += ((a - mq) - (b - me)).powi(2);
        den += (b - me).powi(2);
    }
    Ok((num / den).sqrt())
}
