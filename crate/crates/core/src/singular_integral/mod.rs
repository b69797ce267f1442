//! Discrete convolution engines: mollification, Newtonian potential,
//! principal-value Calderón–Zygmund convolution and Riesz transforms.

mod fft;
mod lattice;
mod mollify;
mod moments;
mod potential;
mod pv;
mod riesz;

pub use fft::{fft_nd, frequencies};
pub use mollify::mollify_field;
pub use potential::{center_cell_potential, convolve_potential};
pub use pv::{pv_convolve, pv_convolve_many, pv_convolve_points, pv_convolve_report, Kernel, PvOutcome};
pub use riesz::{riesz_pv, riesz_pv_points, riesz_spectral, riesz_transform, RieszMethod};

use crate::error::{Error, Result};

/// Treatment of the cells excluded by the truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearCellRule {
    /// Excluded cells contribute nothing.
    Skip,
    /// Excluded cells contribute the first and second Taylor moments of `g`
    /// at the evaluation point against the exact kernel moments.
    TaylorCell,
}

/// Principal-value settings. Truncation radii are in units of the grid
/// spacing; a radius of 1 excludes only the evaluation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PvConfig {
    pub delta_seq: Vec<f64>,
    pub near_cell_rule: NearCellRule,
    pub extrapolate: bool,
}

impl Default for PvConfig {
    /// Truncation at `{4h, 2h, h}`, Taylor moments for the excluded cells and
    /// extrapolation to zero radius in `delta^2`.
    fn default() -> Self {
        Self { delta_seq: vec![4.0, 2.0, 1.0], near_cell_rule: NearCellRule::TaylorCell, extrapolate: true }
    }
}

impl PvConfig {
    /// Excludes only the evaluation cell and corrects it with Taylor moments.
    pub fn single_cell() -> Self {
        Self { delta_seq: vec![1.0], near_cell_rule: NearCellRule::TaylorCell, extrapolate: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta_seq.is_empty() {
            return Err(Error::InvalidArgument("delta_seq is empty".into()));
        }
        for w in self.delta_seq.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidArgument(format!(
                    "delta_seq must be strictly decreasing, got {:?}",
                    self.delta_seq
                )));
            }
        }
        let min = *self.delta_seq.last().unwrap();
        if !(min >= 1.0 && self.delta_seq[0].is_finite()) {
            return Err(Error::InvalidArgument(format!("smallest truncation radius {min} is below one grid spacing")));
        }
        if self.extrapolate && self.delta_seq.len() < 2 {
            return Err(Error::InvalidArgument("extrapolation needs at least two radii".into()));
        }
        Ok(())
    }
}
