//! Closed-form kernels: Newtonian potential and derivatives, the
//! Calderón–Zygmund kernels `Omega_ij`, Riesz kernels, the mollifier and the
//! smooth cutoff.

mod cutoff;
mod mollifier;
mod sphere;

pub use cutoff::{smoothstep, Cutoff};
pub use mollifier::Mollifier;
pub use sphere::{gauss_legendre, sphere_mean, sphere_mean_with};

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// `Gamma(k / 2)` for a positive integer `k`, via the exact recurrence from
/// `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_half(k: usize) -> f64 {
    let mut g = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < k as f64 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

/// Surface area of the unit sphere `S^{n-1}`, `n * alpha(n)`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Normalising constant of the Riesz kernel `c_n y_j / |y|^{n+1}`.
pub fn riesz_constant(n: usize) -> f64 {
    gamma_half(n + 1) / PI.powf((n as f64 + 1.0) / 2.0)
}

fn norm<const D: usize>(x: &[f64; D]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn nonzero<const D: usize>(x: &[f64; D]) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        Err(Error::Singular)
    } else {
        Ok(r)
    }
}

/// Fundamental solution of `-Laplace`: `-(1/2pi) log|x|` in the plane,
/// `|x|^{2-n} / (n (n-2) alpha(n))` otherwise.
pub fn newtonian_potential<const D: usize>(x: &[f64; D]) -> Result<f64> {
    let r = nonzero(x)?;
    Ok(potential_radial(D, r))
}

pub(crate) fn potential_radial(n: usize, r: f64) -> f64 {
    if n == 2 {
        -r.ln() / (2.0 * PI)
    } else {
        r.powi(2 - n as i32) / (n as f64 * (n as f64 - 2.0) * unit_ball_volume(n))
    }
}

/// `grad Phi(x) = -x / (omega_n |x|^n)`.
pub fn newtonian_gradient<const D: usize>(x: &[f64; D]) -> Result<[f64; D]> {
    let r = nonzero(x)?;
    let c = -1.0 / (sphere_area(D) * r.powi(D as i32));
    Ok(std::array::from_fn(|a| c * x[a]))
}

/// Pointwise Hessian of `Phi` away from the origin, `-Omega(x) / (omega_n |x|^n)`.
///
/// As a distribution the Hessian also carries `-(delta_ij / n)` times a point
/// mass at the origin, which this function does not represent.
pub fn newtonian_hessian<const D: usize>(x: &[f64; D]) -> Result<[[f64; D]; D]> {
    let r = nonzero(x)?;
    let c = -1.0 / (sphere_area(D) * r.powi(D as i32));
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = c * omega(i, j, x, r);
        }
    }
    Ok(m)
}

#[inline]
fn omega<const D: usize>(i: usize, j: usize, y: &[f64; D], r: f64) -> f64 {
    let d = if i == j { 1.0 } else { 0.0 };
    d - D as f64 * (y[i] * y[j]) / (r * r)
}

/// `Omega_ij(y) = delta_ij - n y_i y_j / |y|^2`, homogeneous of degree zero.
pub fn cz_kernel<const D: usize>(i: usize, j: usize, y: &[f64; D]) -> Result<f64> {
    let r = nonzero(y)?;
    Ok(omega(i, j, y, r))
}

/// Riesz kernel `c_n y_j / |y|^{n+1}`.
pub fn riesz_kernel<const D: usize>(j: usize, y: &[f64; D]) -> Result<f64> {
    let r = nonzero(y)?;
    Ok(riesz_constant(D) * y[j] / r.powi(D as i32 + 1))
}

/// `grad_y [eta(y) Phi(x - y)]`.
pub fn eta_phi_gradient<const D: usize>(x: &[f64; D], y: &[f64; D], cutoff: &Cutoff<D>) -> Result<[f64; D]> {
    let r: [f64; D] = std::array::from_fn(|a| y[a] - x[a]);
    let rn = nonzero(&r)?;
    let phi = potential_radial(D, rn);
    let dphi = -1.0 / (sphere_area(D) * rn.powi(D as i32));
    let (eta, grad, _) = cutoff.jet(y);
    Ok(std::array::from_fn(|a| grad[a] * phi + eta * dphi * r[a]))
}

/// `grad_y grad_y [eta(y) Phi(x - y)]` off the diagonal `y = x`.
pub fn eta_phi_hessian<const D: usize>(x: &[f64; D], y: &[f64; D], cutoff: &Cutoff<D>) -> Result<[[f64; D]; D]> {
    let r: [f64; D] = std::array::from_fn(|a| y[a] - x[a]);
    let rn = nonzero(&r)?;
    let phi = potential_radial(D, rn);
    let c = -1.0 / (sphere_area(D) * rn.powi(D as i32));
    let (eta, g, h) = cutoff.jet(y);
    let mut m = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            m[i][j] = phi * h[i][j] + c * (g[i] * r[j] + r[i] * g[j]) + eta * c * omega(i, j, &r, rn);
        }
    }
    Ok(m)
}
