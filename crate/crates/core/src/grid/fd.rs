//! Second-order finite differences: centred in the interior, one-sided
//! three-point closures on the first and last node of each axis.

use super::{GridField, GridSpec, ScalarField, TensorField, VectorField};
use crate::error::Result;

/// Derivative along axis `axis` of the `comp`-th component of a strided
/// sample array, evaluated at node `k`.
#[inline]
pub fn stencil_derivative<const D: usize>(
    spec: &GridSpec<D>,
    data: &[f64],
    ncomp: usize,
    comp: usize,
    axis: usize,
    k: usize,
) -> f64 {
    let n = spec.shape()[axis];
    let s = spec.stride(axis);
    let i = (k / s) % n;
    let h = spec.spacing()[axis];
    let at = |kk: usize| data[kk * ncomp + comp];
    if i == 0 {
        // Written in differences so constant data gives exactly zero.
        (4.0 * (at(k + s) - at(k)) - (at(k + 2 * s) - at(k))) / (2.0 * h)
    } else if i == n - 1 {
        (4.0 * (at(k) - at(k - s)) - (at(k) - at(k - 2 * s))) / (2.0 * h)
    } else {
        (at(k + s) - at(k - s)) / (2.0 * h)
    }
}

pub fn gradient_fd<const D: usize>(f: &ScalarField<D>) -> Result<VectorField<D>> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(spec.len() * D);
    for k in 0..spec.len() {
        for a in 0..D {
            out.push(stencil_derivative(spec, f.values(), 1, 0, a, k));
        }
    }
    VectorField::from_raw(spec.clone(), out)
}

/// Row-wise divergence `(div F)^i = sum_j d_j F^i_j`.
pub fn divergence_fd<const D: usize>(f: &TensorField<D>) -> Result<VectorField<D>> {
    let spec = f.spec();
    let mut out = Vec::with_capacity(spec.len() * D);
    for k in 0..spec.len() {
        for i in 0..D {
            let mut s = 0.0;
            for j in 0..D {
                s += stencil_derivative(spec, f.data(), D * D, i * D + j, j, k);
            }
            out.push(s);
        }
    }
    VectorField::from_raw(spec.clone(), out)
}

pub fn divergence_vector_fd<const D: usize>(v: &VectorField<D>) -> Result<ScalarField<D>> {
    let spec = v.spec();
    let out = (0..spec.len()).map(|k| (0..D).map(|a| stencil_derivative(spec, v.data(), D, a, a, k)).sum()).collect();
    ScalarField::from_raw(spec.clone(), out)
}

/// `(grad u)^i_j = d_j u^i`.
pub fn jacobian_fd<const D: usize>(u: &VectorField<D>) -> Result<TensorField<D>> {
    let spec = u.spec();
    let mut out = Vec::with_capacity(spec.len() * D * D);
    for k in 0..spec.len() {
        for i in 0..D {
            for j in 0..D {
                out.push(stencil_derivative(spec, u.data(), D, i, j, k));
            }
        }
    }
    TensorField::from_raw(spec.clone(), out)
}
