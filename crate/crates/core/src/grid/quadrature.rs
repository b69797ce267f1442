use super::{ScalarField, Window};
use crate::error::{Error, Result};

/// Composite rule applied over the nodes of a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadRule {
    /// Each node carries a full cell volume (cell-centred view).
    #[default]
    Midpoint,
    /// Half weights on the first and last node of each axis.
    Trapezoid,
}

/// Midpoint quadrature of `f` over the cells of `w`.
pub fn integrate<const D: usize>(f: &ScalarField<D>, w: &Window<D>) -> Result<f64> {
    integrate_with(f, w, QuadRule::Midpoint)
}

/// Sums in row-major window order, so results are reproducible bit for bit.
pub fn integrate_with<const D: usize>(f: &ScalarField<D>, w: &Window<D>, rule: QuadRule) -> Result<f64> {
    let spec = f.spec();
    w.check_within(spec)?;
    let dv = spec.cell_volume();
    let mut sum = 0.0;
    for idx in w.indices() {
        let mut weight = 1.0;
        if rule == QuadRule::Trapezoid {
            for a in 0..D {
                if w.hi[a] - w.lo[a] > 1 && (idx[a] == w.lo[a] || idx[a] == w.hi[a] - 1) {
                    weight *= 0.5;
                }
            }
        }
        sum += weight * f.values()[spec.linear(&idx)];
    }
    Ok(sum * dv)
}

/// `(sum |f|^r dV)^(1/r)` over the window.
pub fn lr_norm<const D: usize>(f: &ScalarField<D>, r: f64, w: &Window<D>) -> Result<f64> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("exponent r = {r} must be >= 1")));
    }
    let spec = f.spec();
    w.check_within(spec)?;
    let mut sum = 0.0;
    for idx in w.indices() {
        sum += f.values()[spec.linear(&idx)].abs().powf(r);
    }
    Ok((sum * spec.cell_volume()).powf(1.0 / r))
}

/// `max - min` of the samples in the window.
pub fn oscillation<const D: usize>(f: &ScalarField<D>, w: &Window<D>) -> Result<f64> {
    let spec = f.spec();
    w.check_within(spec)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for idx in w.indices() {
        let v = f.values()[spec.linear(&idx)];
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(hi - lo)
}
