//! Uniform Cartesian grids in two and three dimensions.
//!
//! Nodes are stored row-major: axis 0 varies slowest. Multi-component
//! fields interleave their components at each node (component-fastest), and
//! tensor components follow the `f^i_j` convention with `i` the row.

mod fd;
mod field;
mod interp;
mod quadrature;

pub use fd::{divergence_fd, divergence_vector_fd, gradient_fd, jacobian_fd, stencil_derivative};
pub use field::{GridField, ScalarField, TensorField, VectorField};
pub use interp::interpolate;
pub use quadrature::{integrate, integrate_with, lr_norm, oscillation, QuadRule};

use crate::error::{Error, Result};

/// Minimum samples per axis; second-order one-sided closures need three
/// points and the centered second difference needs a neighbour on each side.
pub const MIN_SAMPLES: usize = 4;

/// Geometry of a uniform grid: `shape[a]` nodes along axis `a` at
/// `origin[a] + k * spacing[a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<const D: usize> {
    shape: [usize; D],
    spacing: [f64; D],
    origin: [f64; D],
}

impl<const D: usize> GridSpec<D> {
    pub fn new(shape: [usize; D], spacing: [f64; D], origin: [f64; D]) -> Result<Self> {
        if D != 2 && D != 3 {
            return Err(Error::InvalidGrid(format!("dimension {D} not supported")));
        }
        for a in 0..D {
            if shape[a] < MIN_SAMPLES {
                return Err(Error::InvalidGrid(format!(
                    "axis {a} has {} samples, need at least {MIN_SAMPLES}",
                    shape[a]
                )));
            }
            if !(spacing[a].is_finite() && spacing[a] > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {a} spacing {} must be positive and finite", spacing[a])));
            }
            if !origin[a].is_finite() {
                return Err(Error::InvalidGrid(format!("axis {a} origin is not finite")));
            }
        }
        Ok(Self { shape, spacing, origin })
    }

    /// Cell-centred grid with `n` nodes per axis covering `[lo, hi]^D`.
    pub fn cell_centered(n: usize, lo: f64, hi: f64) -> Result<Self> {
        let h = (hi - lo) / n as f64;
        Self::new([n; D], [h; D], [lo + 0.5 * h; D])
    }

    pub fn dim(&self) -> usize {
        D
    }

    pub fn shape(&self) -> [usize; D] {
        self.shape
    }

    pub fn spacing(&self) -> [f64; D] {
        self.spacing
    }

    pub fn origin(&self) -> [f64; D] {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn linear(&self, idx: &[usize; D]) -> usize {
        let mut k = 0;
        for a in 0..D {
            k = k * self.shape[a] + idx[a];
        }
        k
    }

    pub fn multi(&self, mut k: usize) -> [usize; D] {
        let mut idx = [0; D];
        for a in (0..D).rev() {
            idx[a] = k % self.shape[a];
            k /= self.shape[a];
        }
        idx
    }

    pub fn point(&self, idx: &[usize; D]) -> [f64; D] {
        std::array::from_fn(|a| self.origin[a] + idx[a] as f64 * self.spacing[a])
    }

    pub fn point_linear(&self, k: usize) -> [f64; D] {
        self.point(&self.multi(k))
    }

    /// Stride of axis `a` in the linear node index.
    pub fn stride(&self, a: usize) -> usize {
        self.shape[a + 1..].iter().product()
    }

    /// Grid covering exactly the nodes of `w`.
    pub fn subgrid(&self, w: &Window<D>) -> Result<Self> {
        w.check_within(self)?;
        let shape = std::array::from_fn(|a| w.hi[a] - w.lo[a]);
        let origin = self.point(&w.lo);
        Self::new(shape, self.spacing, origin)
    }

    /// Physical extent `[first node, last node]` of a window.
    pub fn window_bounds(&self, w: &Window<D>) -> ([f64; D], [f64; D]) {
        let lo = self.point(&w.lo);
        let hi = self.point(&std::array::from_fn(|a| w.hi[a] - 1));
        (lo, hi)
    }

    pub(crate) fn same_as(&self, other: &Self) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        let ok = self.shape == other.shape
            && (0..D).all(|a| close(self.spacing[a], other.spacing[a]) && close(self.origin[a], other.origin[a]));
        if ok {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Half-open box of node indices `lo[a] <= i < hi[a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window<const D: usize> {
    pub lo: [usize; D],
    pub hi: [usize; D],
}

impl<const D: usize> Window<D> {
    pub fn new(lo: [usize; D], hi: [usize; D]) -> Result<Self> {
        for a in 0..D {
            if lo[a] >= hi[a] {
                return Err(Error::InvalidWindow(format!("axis {a}: lo {} must be below hi {}", lo[a], hi[a])));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn full(spec: &GridSpec<D>) -> Self {
        Self { lo: [0; D], hi: spec.shape() }
    }

    /// Centred window spanning `fraction` of each axis.
    pub fn central(spec: &GridSpec<D>, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidWindow(format!("fraction {fraction} not in (0, 1]")));
        }
        let shape = spec.shape();
        let mut lo = [0; D];
        let mut hi = [0; D];
        for a in 0..D {
            let width = ((fraction * shape[a] as f64).round() as usize).clamp(1, shape[a]);
            lo[a] = (shape[a] - width) / 2;
            hi[a] = lo[a] + width;
        }
        Self::new(lo, hi)
    }

    pub fn shape(&self) -> [usize; D] {
        std::array::from_fn(|a| self.hi[a] - self.lo[a])
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, idx: &[usize; D]) -> bool {
        (0..D).all(|a| idx[a] >= self.lo[a] && idx[a] < self.hi[a])
    }

    /// True when `self` sits inside `outer` with at least `margin` nodes to spare.
    pub fn inside(&self, outer: &Window<D>, margin: usize) -> bool {
        (0..D).all(|a| self.lo[a] >= outer.lo[a] + margin && self.hi[a] + margin <= outer.hi[a])
    }

    pub fn check_within(&self, spec: &GridSpec<D>) -> Result<()> {
        let shape = spec.shape();
        for a in 0..D {
            if self.lo[a] >= self.hi[a] || self.hi[a] > shape[a] {
                return Err(Error::InvalidWindow(format!(
                    "axis {a}: [{}, {}) not inside [0, {})",
                    self.lo[a], self.hi[a], shape[a]
                )));
            }
        }
        Ok(())
    }

    /// Window at least `margin` cells away from every grid boundary.
    pub fn check_interior(&self, spec: &GridSpec<D>, margin: usize) -> Result<()> {
        self.check_within(spec)?;
        if !self.inside(&Window::full(spec), margin) {
            return Err(Error::InvalidWindow(format!("{self:?} is closer than {margin} cells to the grid boundary")));
        }
        Ok(())
    }

    /// Node indices of the window in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = [usize; D]> + '_ {
        let shape = self.shape();
        let count = self.len();
        (0..count).map(move |mut k| {
            let mut idx = [0; D];
            for a in (0..D).rev() {
                idx[a] = self.lo[a] + k % shape[a];
                k /= shape[a];
            }
            idx
        })
    }
}
