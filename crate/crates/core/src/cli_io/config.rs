//! `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; unknown and repeated keys are errors.

use crate::elasticity::Material;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, Window, MIN_SAMPLES};
use crate::pressure::{DEFAULT_V_FRACTION, DEFAULT_W_FRACTION};
use crate::regularity::DEFAULT_SEED;
use crate::singular_integral::PvConfig;
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;
use std::path::Path;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "CZP_CONFIG";

pub const KEYS: &[&str] = &[
    "grid.dim",
    "grid.n",
    "grid.lo",
    "grid.hi",
    "windows.inner",
    "windows.outer",
    "pv.delta_seq",
    "pv.extrapolate",
    "material.mu1",
    "material.mu2",
    "material.lambda0",
    "solver.tol",
    "solver.max_iter",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// Dimension of synthetic grids.
    pub dim: usize,
    /// Nodes per axis of synthetic grids, cell-centred on `[lo, hi]^dim`.
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    /// Fraction of the grid covered by `W`.
    pub inner: f64,
    /// Fraction of the grid covered by `V`.
    pub outer: f64,
    /// Truncation radii in units of the largest spacing.
    pub delta_seq: Vec<f64>,
    pub extrapolate: bool,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda0: f64,
    /// Newton inversion tolerance and iteration cap.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pv = PvConfig::default();
        let m = Material::default();
        Self {
            dim: 2,
            n: 64,
            lo: 0.0,
            hi: 1.0,
            inner: DEFAULT_W_FRACTION,
            outer: DEFAULT_V_FRACTION,
            delta_seq: pv.delta_seq,
            extrapolate: pv.extrapolate,
            mu1: m.mu1,
            mu2: m.mu2,
            lambda0: m.lambda0,
            tol: crate::elasticity::NEWTON_TOL,
            max_iter: crate::elasticity::NEWTON_MAX_ITER,
            seed: DEFAULT_SEED,
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.into(), reason: reason.into() }
}

fn number(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, format!("`{v}` is not finite")));
    }
    Ok(x)
}

fn integer(key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(&format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(bad(key, "unknown key"));
            }
            if !seen.insert(key.to_string()) {
                return Err(bad(key, "repeated key"));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "grid.dim" => self.dim = integer(key, v)? as usize,
            "grid.n" => self.n = integer(key, v)? as usize,
            "grid.lo" => self.lo = number(key, v)?,
            "grid.hi" => self.hi = number(key, v)?,
            "windows.inner" => self.inner = number(key, v)?,
            "windows.outer" => self.outer = number(key, v)?,
            "pv.delta_seq" => {
                self.delta_seq = v.split(',').map(|s| number(key, s.trim())).collect::<Result<_>>()?;
            }
            "pv.extrapolate" => {
                self.extrapolate = match v {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad(key, format!("`{v}` is not true or false"))),
                }
            }
            "material.mu1" => self.mu1 = number(key, v)?,
            "material.mu2" => self.mu2 = number(key, v)?,
            "material.lambda0" => self.lambda0 = number(key, v)?,
            "solver.tol" => self.tol = number(key, v)?,
            "solver.max_iter" => self.max_iter = integer(key, v)? as usize,
            "seed" => self.seed = integer(key, v)?,
            _ => unreachable!("key list and setter disagree on {key}"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(bad("grid.dim", format!("{} not in {{2, 3}}", self.dim)));
        }
        if self.n < MIN_SAMPLES {
            return Err(bad("grid.n", format!("{} is below the minimum of {MIN_SAMPLES}", self.n)));
        }
        if self.hi <= self.lo {
            return Err(bad("grid.hi", format!("{} must exceed grid.lo = {}", self.hi, self.lo)));
        }
        if !(self.inner > 0.0 && self.inner < 1.0) {
            return Err(bad("windows.inner", format!("{} not in (0, 1)", self.inner)));
        }
        if !(self.outer > self.inner && self.outer < 1.0) {
            return Err(bad("windows.outer", format!("{} not in (windows.inner, 1)", self.outer)));
        }
        if self.delta_seq.is_empty() || self.delta_seq.iter().any(|d| *d <= 0.0) {
            return Err(bad("pv.delta_seq", "needs one or more positive radii"));
        }
        if self.mu1 <= 0.0 {
            return Err(bad("material.mu1", format!("{} must be positive", self.mu1)));
        }
        if self.mu2 < 0.0 {
            return Err(bad("material.mu2", format!("{} must be non-negative", self.mu2)));
        }
        if self.lambda0 <= 0.0 {
            return Err(bad("material.lambda0", format!("{} must be positive", self.lambda0)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(bad("solver.tol", format!("{} not in (0, 1)", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(bad("solver.max_iter", "must be at least 1"));
        }
        self.pv().validate().map_err(|e| bad("pv.delta_seq", e.to_string()))
    }

    pub fn pv(&self) -> PvConfig {
        PvConfig { delta_seq: self.delta_seq.clone(), extrapolate: self.extrapolate, ..PvConfig::default() }
    }

    pub fn material(&self) -> Material {
        Material { mu1: self.mu1, mu2: self.mu2, lambda0: self.lambda0 }
    }

    pub fn grid<const D: usize>(&self) -> Result<GridSpec<D>> {
        GridSpec::cell_centered(self.n, self.lo, self.hi)
    }

    /// `(W, V)` on `spec`.
    pub fn windows<const D: usize>(&self, spec: &GridSpec<D>) -> Result<(Window<D>, Window<D>)> {
        Ok((Window::central(spec, self.inner)?, Window::central(spec, self.outer)?))
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq: Vec<String> = self.delta_seq.iter().map(|d| d.to_string()).collect();
        writeln!(f, "grid.dim = {}", self.dim)?;
        writeln!(f, "grid.n = {}", self.n)?;
        writeln!(f, "grid.lo = {}", self.lo)?;
        writeln!(f, "grid.hi = {}", self.hi)?;
        writeln!(f, "windows.inner = {}", self.inner)?;
        writeln!(f, "windows.outer = {}", self.outer)?;
        writeln!(f, "pv.delta_seq = {}", seq.join(","))?;
        writeln!(f, "pv.extrapolate = {}", self.extrapolate)?;
        writeln!(f, "material.mu1 = {}", self.mu1)?;
        writeln!(f, "material.mu2 = {}", self.mu2)?;
        writeln!(f, "material.lambda0 = {}", self.lambda0)?;
        writeln!(f, "solver.tol = {:e}", self.tol)?;
        writeln!(f, "solver.max_iter = {}", self.max_iter)?;
        writeln!(f, "seed = {}", self.seed)
    }
}
