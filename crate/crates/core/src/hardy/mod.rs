//! Local Hardy-space diagnostics: the local maximal function over a finite
//! set of mollifier scales, the `h^r` surrogate built from it, the
//! `L log L` integral and the Riesz-transform Hardy norm.
//!
//! The maximal function is a sup over sampled scales, so every quantity here
//! is a lower bound for its continuous counterpart. The `h^r` norm is taken
//! on an interior window of the grid rather than as the quotient norm of
//! restrictions.

use crate::error::{Error, Result};
use crate::grid::{integrate, lr_norm, GridField, GridSpec, ScalarField, Window};
use crate::kernels::Mollifier;
use crate::singular_integral::{mollify_field, riesz_transform, RieszMethod};

/// Number of scales in [`default_scales`].
pub const DEFAULT_SCALE_COUNT: usize = 16;

/// `DEFAULT_SCALE_COUNT` log-spaced scales strictly inside
/// `(h, min(1, L / 4))`, with `h` the largest spacing and `L` the shortest
/// grid extent.
pub fn default_scales<const D: usize>(spec: &GridSpec<D>) -> Vec<f64> {
    let h = spec.spacing().iter().cloned().fold(0.0, f64::max);
    let extent = (0..D).map(|a| spec.shape()[a] as f64 * spec.spacing()[a]).fold(f64::INFINITY, f64::min);
    let top = (0.25 * extent).min(1.0);
    let n = DEFAULT_SCALE_COUNT;
    (1..=n).map(|k| h * (top / h).powf(k as f64 / (n + 1) as f64)).collect()
}

/// `max(|f|, max_eps |rho_eps * f|)` at every node. The `|f|` term is the
/// `eps -> 0` limit, which the sup over `(0, 1)` dominates.
pub fn local_maximal<const D: usize>(f: &ScalarField<D>, scales: &[f64]) -> Result<ScalarField<D>> {
    let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    for &eps in scales {
        let m = mollify_field(f, &Mollifier::new(eps)?)?;
        for (o, v) in out.iter_mut().zip(m.values()) {
            *o = o.max(v.abs());
        }
    }
    ScalarField::from_raw(f.spec().clone(), out)
}

/// `||M_loc f||_{L^r(w)}` with the default scales.
pub fn hr_norm<const D: usize>(f: &ScalarField<D>, r: f64, w: &Window<D>) -> Result<f64> {
    lr_norm(&local_maximal(f, &default_scales(f.spec()))?, r, w)
}

/// `int_w f log(2 + f)` for non-negative `f`.
pub fn llogl_norm<const D: usize>(f: &ScalarField<D>, w: &Window<D>) -> Result<f64> {
    if let Some(v) = f.values().iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidArgument(format!("L log L needs a non-negative field, found {v}")));
    }
    integrate(&f.map(|v| v * (2.0 + v).ln())?, w)
}

/// `||f||_{L^r(w)} + sum_j ||R_j f||_{L^r(w)}` with spectral Riesz transforms.
pub fn hardy_norm<const D: usize>(f: &ScalarField<D>, r: f64, w: &Window<D>) -> Result<f64> {
    hardy_norm_with(f, r, w, &RieszMethod::default())
}

pub fn hardy_norm_with<const D: usize>(f: &ScalarField<D>, r: f64, w: &Window<D>, method: &RieszMethod) -> Result<f64> {
    let mut total = lr_norm(f, r, w)?;
    for j in 0..D {
        total += lr_norm(&riesz_transform(j, f, method)?, r, w)?;
    }
    Ok(total)
}
