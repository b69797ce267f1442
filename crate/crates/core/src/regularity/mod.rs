//! Ellipticity of the pressure-modified operator in the plane: the form
//! `I(xi) = lambda0 |xi|^2 - 2 p det xi`, its completed squares and the
//! oscillation criterion `osc p < lambda0`.

use crate::elasticity::matrix::{det, norm2, Matrix};
use crate::error::{Error, Result};
use crate::grid::{oscillation, GridSpec, ScalarField, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pair budget of [`holder_seminorm`]; larger regions are subsampled.
pub const MAX_PAIRS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// `lambda0 |xi|^2 - 2 p det xi`.
pub fn quadratic_form(p: f64, lambda0: f64, xi: &Matrix<2>) -> f64 {
    lambda0 * norm2(xi) - 2.0 * p * det(xi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaresCheck {
    /// `I / lambda0` evaluated directly.
    pub direct: f64,
    /// `|first completed-square form - I / lambda0|`.
    pub residual_first: f64,
    /// `|mirrored completed-square form - I / lambda0|`.
    pub residual_mirror: f64,
    /// `|sum of both forms - 2 I / lambda0|`.
    pub residual_sum: f64,
    /// `2 I / lambda0 - (1 - p^2 / lambda0^2) |xi|^2`, non-negative when `|p| <= lambda0`.
    pub slack: f64,
}

/// Compares `I / lambda0` with its two completed-square expansions and
/// evaluates the slack of the averaged lower bound.
pub fn completing_squares_check(p: f64, lambda0: f64, xi: &Matrix<2>) -> SquaresCheck {
    let t = p / lambda0;
    let [[a, b], [c, d]] = *xi;
    let direct = quadratic_form(p, lambda0, xi) / lambda0;
    let k = 1.0 - t * t;
    // det xi = ad - bc, so the off-diagonal squares carry a plus sign.
    let first = (a - t * d).powi(2) + (b + t * c).powi(2) + k * (d * d + c * c);
    let mirror = (d - t * a).powi(2) + (c + t * b).powi(2) + k * (a * a + b * b);
    let sum = (a - t * d).powi(2) + (b + t * c).powi(2) + (d - t * a).powi(2) + (c + t * b).powi(2) + k * norm2(xi);
    SquaresCheck {
        direct,
        residual_first: (first - direct).abs(),
        residual_mirror: (mirror - direct).abs(),
        residual_sum: (sum - 2.0 * direct).abs(),
        slack: 2.0 * direct - k * norm2(xi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityReport {
    pub osc: f64,
    /// `lambda0 - osc`.
    pub margin: f64,
    /// `osc < lambda0`, strictly.
    pub criterion_met: bool,
    /// Largest `mu0 >= 0` with `(p - mu0)^2 <= (lambda0 - mu0)^2` for some
    /// constant shift of `p`, i.e. `p` fits in `[2 mu0 - lambda0, lambda0]`:
    /// `lambda0 - osc / 2`. `None` when even `mu0 = 0` fails.
    pub mu0_feasible: Option<f64>,
}

/// Oscillation criterion for `p` on `region`.
pub fn ellipticity_criterion<const D: usize>(
    p: &ScalarField<D>,
    lambda0: f64,
    region: &Window<D>,
) -> Result<EllipticityReport> {
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda0 must be positive, got {lambda0}")));
    }
    let osc = oscillation(p, region)?;
    let margin = lambda0 - osc;
    let mu0 = lambda0 - 0.5 * osc;
    Ok(EllipticityReport { osc, margin, criterion_met: margin > 0.0, mu0_feasible: (mu0 >= 0.0).then_some(mu0) })
}

fn holder_ratio<const D: usize>(
    spec: &GridSpec<D>,
    p: &ScalarField<D>,
    a: &[usize; D],
    b: &[usize; D],
    alpha: f64,
) -> f64 {
    let (x, y) = (spec.point(a), spec.point(b));
    let dist = (0..D).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>().sqrt();
    (p.at(a) - p.at(b)).abs() / dist.powf(alpha)
}

/// `max |p(x) - p(y)| / |x - y|^alpha` over node pairs of `region`: every
/// pair when there are at most [`MAX_PAIRS`], otherwise that many pairs
/// drawn with [`DEFAULT_SEED`].
pub fn holder_seminorm<const D: usize>(p: &ScalarField<D>, alpha: f64, region: &Window<D>) -> Result<f64> {
    holder_seminorm_seeded(p, alpha, region, DEFAULT_SEED)
}

pub fn holder_seminorm_seeded<const D: usize>(
    p: &ScalarField<D>,
    alpha: f64,
    region: &Window<D>,
    seed: u64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("Hoelder exponent {alpha} not in (0, 1]")));
    }
    let spec = p.spec();
    region.check_within(spec)?;
    let nodes: Vec<[usize; D]> = region.indices().collect();
    let n = nodes.len();
    let mut best = 0.0f64;
    if n * n.saturating_sub(1) / 2 <= MAX_PAIRS {
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(holder_ratio(spec, p, &nodes[i], &nodes[j], alpha));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..MAX_PAIRS {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            best = best.max(holder_ratio(spec, p, &nodes[i], &nodes[j], alpha));
        }
    }
    Ok(best)
}
