use super::matrix::{add, cofactor, half_cof_norm_gradient, matmul, norm2, scale, transpose, Matrix};
use crate::error::{Error, Result};

/// Mooney–Rivlin constants and the ellipticity constant used by the
/// regularity diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub mu1: f64,
    pub mu2: f64,
    pub lambda0: f64,
}

impl Material {
    pub fn new(mu1: f64, mu2: f64, lambda0: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite();
        if !(ok(mu1) && mu1 > 0.0) {
            return Err(Error::InvalidArgument(format!("mu1 must be positive, got {mu1}")));
        }
        if !(ok(mu2) && mu2 >= 0.0) {
            return Err(Error::InvalidArgument(format!("mu2 must be non-negative, got {mu2}")));
        }
        if !(ok(lambda0) && lambda0 > 0.0) {
            return Err(Error::InvalidArgument(format!("lambda0 must be positive, got {lambda0}")));
        }
        Ok(Self { mu1, mu2, lambda0 })
    }

    /// Neo-Hookean special case `mu2 = 0`.
    pub fn neo_hookean(mu1: f64, lambda0: f64) -> Result<Self> {
        Self::new(mu1, 0.0, lambda0)
    }
}

impl Default for Material {
    fn default() -> Self {
        Self { mu1: 1.0, mu2: 0.5, lambda0: 1.0 }
    }
}

/// `L(P) = mu1/2 (|P|^2 - n) + mu2/2 (|cof P|^2 - n)`. The offset `n` makes
/// `L(Id) = 0` in both dimensions.
pub fn mr_energy<const D: usize>(p: &Matrix<D>, m: &Material) -> f64 {
    let n = D as f64;
    0.5 * m.mu1 * (norm2(p) - n) + 0.5 * m.mu2 * (norm2(&cofactor(p)) - n)
}

/// `DL(P) = mu1 P + mu2 grad(|cof P|^2 / 2)`.
pub fn mr_stress<const D: usize>(p: &Matrix<D>, m: &Material) -> Matrix<D> {
    add(&scale(m.mu1, p), &scale(m.mu2, &half_cof_norm_gradient(p)))
}

/// `DL(P) P^T`, the strain of a deformation with gradient `P`; entry `(i, j)`
/// is `sum_k L^i_k(P) P^j_k`.
pub fn strain_of_gradient<const D: usize>(p: &Matrix<D>, m: &Material) -> Matrix<D> {
    matmul(&mr_stress(p, m), &transpose(p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    /// `|L(P)|`.
    pub energy: f64,
    /// Frobenius norm of `(DL(P))^T P`.
    pub strain: f64,
    /// `C (1 + |P|^2 + |cof P|^2)`.
    pub bound: f64,
    /// `bound - max(energy, strain)`.
    pub margin: f64,
    pub holds: bool,
}

/// Growth condition `max(|L|, |(DL)^T P|) <= C (1 + |P|^2 + |cof P|^2)`.
pub fn growth_check<const D: usize>(p: &Matrix<D>, m: &Material, c: f64) -> GrowthReport {
    let energy = mr_energy(p, m).abs();
    let strain = norm2(&matmul(&transpose(&mr_stress(p, m)), p)).sqrt();
    let bound = c * (1.0 + norm2(p) + norm2(&cofactor(p)));
    let margin = bound - energy.max(strain);
    GrowthReport { energy, strain, bound, margin, holds: margin >= 0.0 }
}
