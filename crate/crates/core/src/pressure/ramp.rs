//! Product quadrature over the cutoff ramp.
//!
//! Grid data are extended multilinearly between the nodes of `V`, while the
//! cutoff and the Newtonian kernel are sampled in closed form at
//! Gauss–Legendre points inside each lattice cell. The ramp of `eta` spans only
//! a few cells at moderate resolution, so sampling the analytic factors
//! finely is what keeps the four integrals accurate.

use crate::grid::{GridSpec, Window};
use crate::kernels::{gauss_legendre, Cutoff};

/// Gauss points the automatic order aims to place across the narrowest ramp.
pub const RAMP_SAMPLES: f64 = 40.0;
const MIN_ORDER: usize = 3;
/// Cap on Gauss points per cell, which bounds the order at 12 in 2D and 5 in 3D.
const MAX_POINTS_PER_CELL: usize = 144;

/// Gauss order per axis and cell that puts about [`RAMP_SAMPLES`] points
/// across the narrowest ramp of `cutoff`.
pub fn auto_ramp_order<const D: usize>(spec: &GridSpec<D>, cutoff: &Cutoff<D>) -> usize {
    let Some(width) = cutoff.min_ramp_width() else {
        return MIN_ORDER;
    };
    let h = spec.spacing().iter().cloned().fold(0.0, f64::max);
    let max = (1..).take_while(|m: &usize| m.pow(D as u32) <= MAX_POINTS_PER_CELL).last().unwrap_or(1);
    ((RAMP_SAMPLES * h / width).ceil() as usize).clamp(MIN_ORDER.min(max), max)
}

pub(crate) struct RampPoint<const D: usize> {
    pub y: [f64; D],
    /// Quadrature weight including the cell volume.
    pub weight: f64,
    pub grad: [f64; D],
    pub hess: [[f64; D]; D],
    pub lap: f64,
    /// `(V-local linear index, multilinear weight)` of the cell corners.
    pub corners: Vec<(usize, f64)>,
}

pub(crate) struct RampQuadrature<const D: usize> {
    pub points: Vec<RampPoint<D>>,
}

impl<const D: usize> RampQuadrature<D> {
    pub fn new(spec: &GridSpec<D>, cutoff: &Cutoff<D>, v: &Window<D>, order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let h = spec.spacing();
        let vshape = v.shape();
        let local = |idx: &[usize; D]| {
            let mut k = 0;
            for a in 0..D {
                k = k * vshape[a] + (idx[a] - v.lo[a]);
            }
            k
        };
        let cells = Window { lo: v.lo, hi: std::array::from_fn(|a| v.hi[a] - 1) };
        let sub = order.pow(D as u32);
        let mut points = Vec::new();
        for c in cells.indices() {
            let base = spec.point(&c);
            for s in 0..sub {
                let mut t = [0.0; D];
                let mut weight = 1.0;
                let mut rem = s;
                for a in (0..D).rev() {
                    let q = rem % order;
                    rem /= order;
                    t[a] = 0.5 * (gx[q] + 1.0);
                    weight *= 0.5 * gw[q] * h[a];
                }
                let y: [f64; D] = std::array::from_fn(|a| base[a] + t[a] * h[a]);
                if cutoff.is_flat(&y) {
                    continue;
                }
                let (_, grad, hess) = cutoff.jet(&y);
                let lap = (0..D).map(|a| hess[a][a]).sum();
                let corners = (0..1usize << D)
                    .map(|bits| {
                        let mut idx = c;
                        let mut w = 1.0;
                        for a in 0..D {
                            if bits >> a & 1 == 1 {
                                idx[a] += 1;
                                w *= t[a];
                            } else {
                                w *= 1.0 - t[a];
                            }
                        }
                        (local(&idx), w)
                    })
                    .collect();
                points.push(RampPoint { y, weight, grad, hess, lap, corners });
            }
        }
        Self { points }
    }

    /// Multilinear interpolant of V-local nodal data at point `k`.
    pub fn interpolate(&self, k: usize, data: &[f64]) -> f64 {
        self.points[k].corners.iter().map(|&(i, w)| w * data[i]).sum()
    }
}
