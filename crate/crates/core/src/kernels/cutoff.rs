use crate::error::{Error, Result};
use crate::grid::{GridSpec, Window};

/// `S(t) = e(t) / (e(t) + e(1 - t))` with `e(t) = exp(-1/t)`, together with
/// `S'` and `S''`. Equal to 0 for `t <= 0` and 1 for `t >= 1`.
pub fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u = 1.0 - t;
    let a = (-1.0 / t).exp();
    let b = (-1.0 / u).exp();
    let a1 = a / (t * t);
    let a2 = a * (1.0 / t.powi(4) - 2.0 / t.powi(3));
    let b1 = -b / (u * u);
    let b2 = b * (1.0 / u.powi(4) - 2.0 / u.powi(3));
    let s = a + b;
    let num1 = a1 * b - a * b1;
    let d1 = num1 / (s * s);
    let d2 = (a2 * b - a * b2) / (s * s) - 2.0 * num1 * (a1 + b1) / (s * s * s);
    (a / s, d1, d2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct AxisProfile {
    /// Lower ramp rises on `[rise, rise + width_lo]`.
    rise: f64,
    width_lo: f64,
    /// Upper ramp falls on `[fall - width_hi, fall]`.
    fall: f64,
    width_hi: f64,
}

impl AxisProfile {
    fn jet(&self, x: f64) -> (f64, f64, f64) {
        let (p, p1, p2) = smoothstep((x - self.rise) / self.width_lo);
        let (q, q1, q2) = smoothstep((self.fall - x) / self.width_hi);
        let (p1, p2) = (p1 / self.width_lo, p2 / (self.width_lo * self.width_lo));
        let (q1, q2) = (-q1 / self.width_hi, q2 / (self.width_hi * self.width_hi));
        (p * q, p1 * q + p * q1, p2 * q + 2.0 * p1 * q1 + p * q2)
    }
}

/// Smooth cutoff equal to 1 on an inner box and 0 outside an outer box,
/// built as a product of one-dimensional smoothstep ramps.
#[derive(Debug, Clone, PartialEq)]
pub struct Cutoff<const D: usize> {
    axes: Option<[AxisProfile; D]>,
}

impl<const D: usize> Cutoff<D> {
    /// Cutoff for grid windows `inner` inside `outer`. Each ramp occupies
    /// `transition` (in `(0, 1]`) of the gap between the two windows and is
    /// centred in it.
    pub fn new(spec: &GridSpec<D>, inner: &Window<D>, outer: &Window<D>, transition: f64) -> Result<Self> {
        inner.check_within(spec)?;
        outer.check_within(spec)?;
        if !inner.inside(outer, 1) {
            return Err(Error::InvalidWindow(format!("inner window {inner:?} must sit strictly inside {outer:?}")));
        }
        let (wl, wh) = spec.window_bounds(inner);
        let (vl, vh) = spec.window_bounds(outer);
        Self::from_bounds(wl, wh, vl, vh, transition)
    }

    /// Cutoff from physical boxes `[inner_lo, inner_hi] ⊂ (outer_lo, outer_hi)`.
    pub fn from_bounds(
        inner_lo: [f64; D],
        inner_hi: [f64; D],
        outer_lo: [f64; D],
        outer_hi: [f64; D],
        transition: f64,
    ) -> Result<Self> {
        if !(transition > 0.0 && transition <= 1.0) {
            return Err(Error::InvalidArgument(format!("transition {transition} not in (0, 1]")));
        }
        let mut axes = [AxisProfile { rise: 0.0, width_lo: 1.0, fall: 0.0, width_hi: 1.0 }; D];
        for a in 0..D {
            let gap_lo = inner_lo[a] - outer_lo[a];
            let gap_hi = outer_hi[a] - inner_hi[a];
            if !(gap_lo > 0.0 && gap_hi > 0.0 && inner_hi[a] >= inner_lo[a]) {
                return Err(Error::InvalidWindow(format!("axis {a}: inner box not inside outer box")));
            }
            let width_lo = transition * gap_lo;
            let width_hi = transition * gap_hi;
            axes[a] = AxisProfile {
                rise: outer_lo[a] + 0.5 * (gap_lo - width_lo),
                width_lo,
                fall: outer_hi[a] - 0.5 * (gap_hi - width_hi),
                width_hi,
            };
        }
        Ok(Self { axes: Some(axes) })
    }

    /// The constant function 1; not compactly supported, useful only as a
    /// degenerate input where all derivatives vanish.
    pub fn unit() -> Self {
        Self { axes: None }
    }

    /// Value, gradient and Hessian at `x`.
    pub fn jet(&self, x: &[f64; D]) -> (f64, [f64; D], [[f64; D]; D]) {
        let Some(axes) = &self.axes else {
            return (1.0, [0.0; D], [[0.0; D]; D]);
        };
        let j: [(f64, f64, f64); D] = std::array::from_fn(|a| axes[a].jet(x[a]));
        let mut val = 1.0;
        for t in &j {
            val *= t.0;
        }
        let mut grad = [0.0; D];
        let mut hess = [[0.0; D]; D];
        for a in 0..D {
            for b in 0..D {
                let mut p = 1.0;
                for (c, t) in j.iter().enumerate() {
                    p *= if c == a && c == b {
                        t.2
                    } else if c == a || c == b {
                        t.1
                    } else {
                        t.0
                    };
                }
                hess[a][b] = p;
            }
            let mut p = 1.0;
            for (c, t) in j.iter().enumerate() {
                p *= if c == a { t.1 } else { t.0 };
            }
            grad[a] = p;
        }
        (val, grad, hess)
    }

    pub fn eval(&self, x: &[f64; D]) -> f64 {
        self.jet(x).0
    }

    pub fn grad(&self, x: &[f64; D]) -> [f64; D] {
        self.jet(x).1
    }

    pub fn hess(&self, x: &[f64; D]) -> [[f64; D]; D] {
        self.jet(x).2
    }

    /// `Laplace eta` at `x`.
    pub fn laplacian(&self, x: &[f64; D]) -> f64 {
        let h = self.hess(x);
        (0..D).map(|a| h[a][a]).sum()
    }

    /// Narrowest ramp over all axes and both sides; `None` for the unit cutoff.
    pub fn min_ramp_width(&self) -> Option<f64> {
        let axes = self.axes.as_ref()?;
        Some(axes.iter().map(|p| p.width_lo.min(p.width_hi)).fold(f64::INFINITY, f64::min))
    }

    /// True when every derivative of the cutoff vanishes at `x`.
    pub fn is_flat(&self, x: &[f64; D]) -> bool {
        let Some(axes) = &self.axes else {
            return true;
        };
        let outside = (0..D).any(|a| x[a] <= axes[a].rise || x[a] >= axes[a].fall);
        let plateau =
            (0..D).all(|a| x[a] >= axes[a].rise + axes[a].width_lo && x[a] <= axes[a].fall - axes[a].width_hi);
        outside || plateau
    }
}
