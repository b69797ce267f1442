use super::sphere_area;
use crate::error::{Error, Result};
use std::sync::OnceLock;

fn bump(s2: f64) -> f64 {
    if s2 < 1.0 {
        (-1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// `1 / int_{B_1} exp(-1/(1-|x|^2)) dx`, by composite Simpson in the radius.
fn unit_constant(n: usize) -> f64 {
    static CACHE: [OnceLock<f64>; 2] = [OnceLock::new(), OnceLock::new()];
    *CACHE[n - 2].get_or_init(|| {
        let m = 20_000;
        let h = 1.0 / m as f64;
        let f = |s: f64| s.powi(n as i32 - 1) * bump(s * s);
        let mut acc = f(0.0) + f(1.0);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(k as f64 * h);
        }
        1.0 / (sphere_area(n) * acc * h / 3.0)
    })
}

/// Standard mollifier `rho_eps(x) = eps^{-n} rho(x / eps)` with
/// `rho = C exp(-1 / (1 - |x|^2))` on the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier<const D: usize> {
    epsilon: f64,
    scale: f64,
}

impl<const D: usize> Mollifier<D> {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} not in (0, 1)")));
        }
        let scale = unit_constant(D) / epsilon.powi(D as i32);
        Ok(Self { epsilon, scale })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eval(&self, x: &[f64; D]) -> f64 {
        let s2 = x.iter().map(|v| v * v).sum::<f64>() / (self.epsilon * self.epsilon);
        self.scale * bump(s2)
    }

    /// Lattice weights `(offset, w)` for spacing `h`, normalised to unit
    /// discrete mass so constants are reproduced exactly.
    pub fn stencil(&self, spacing: &[f64; D]) -> Vec<([isize; D], f64)> {
        let reach: [isize; D] = std::array::from_fn(|a| (self.epsilon / spacing[a]).ceil() as isize);
        let mut out = Vec::new();
        let mut idx = [0isize; D];
        let count: usize = reach.iter().map(|&r| (2 * r + 1) as usize).product();
        for mut k in 0..count {
            for a in (0..D).rev() {
                let w = (2 * reach[a] + 1) as usize;
                idx[a] = (k % w) as isize - reach[a];
                k /= w;
            }
            let x: [f64; D] = std::array::from_fn(|a| idx[a] as f64 * spacing[a]);
            let w = self.eval(&x);
            if w > 0.0 {
                out.push((idx, w));
            }
        }
        let total: f64 = out.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut out {
            *w /= total;
        }
        out
    }
}
