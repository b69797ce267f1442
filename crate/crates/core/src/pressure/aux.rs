//! Auxiliary divergence problem `div v = g - mean(g)` on the box `V`.
//!
//! The discrete divergence `D` is the finite-difference operator of
//! [`crate::grid::divergence_vector_fd`] on the subgrid of `V`. We return the
//! minimum-norm solution `v = D^T phi` with `D D^T phi = g0`, which is the
//! discrete counterpart of `v = grad w` for the Neumann problem
//! `Laplace w = g0`. `D D^T` is a Kronecker sum of one-dimensional
//! operators and is diagonalised axis by axis.

use super::ramp::{auto_ramp_order, RampPoint, RampQuadrature};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec, ScalarField, VectorField, Window};
use crate::kernels::{potential_radial, Cutoff};
use nalgebra::{DMatrix, SymmetricEigen};

/// Relative L2 divergence residual accepted by [`AuxSolver::solve`].
pub const AUX_TOL: f64 = 1e-6;

const MAX_REFINEMENTS: usize = 4;

/// One-dimensional first-derivative matrix with the grid's stencils.
fn derivative_matrix(n: usize, h: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(n, n);
    let c = 1.0 / (2.0 * h);
    g[(0, 0)] = -3.0 * c;
    g[(0, 1)] = 4.0 * c;
    g[(0, 2)] = -c;
    g[(n - 1, n - 1)] = 3.0 * c;
    g[(n - 1, n - 2)] = -4.0 * c;
    g[(n - 1, n - 3)] = c;
    for i in 1..n - 1 {
        g[(i, i - 1)] = -c;
        g[(i, i + 1)] = c;
    }
    g
}

/// Applies `m` (or its transpose) to every line of `data` along `axis`.
fn along_axis(data: &[f64], shape: &[usize], axis: usize, m: &DMatrix<f64>, transpose: bool) -> Vec<f64> {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![0.0; data.len()];
    let mut line = vec![0.0; n];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * inner];
            }
            for r in 0..n {
                let mut s = 0.0;
                if transpose {
                    for (k, v) in line.iter().enumerate() {
                        s += m[(k, r)] * v;
                    }
                } else {
                    for (k, v) in line.iter().enumerate() {
                        s += m[(r, k)] * v;
                    }
                }
                out[base + r * inner] = s;
            }
        }
    }
    out
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solution of the auxiliary problem with its residual history.
#[derive(Debug, Clone)]
pub struct AuxSolution<const D: usize> {
    pub v: VectorField<D>,
    /// Relative L2 residual of `div v = P g0` after each pass, where `P`
    /// projects onto the range of the discrete divergence.
    pub history: Vec<f64>,
    /// `||g0 - P g0|| / ||g0||`: the part of the source along the
    /// checkerboard null mode of `D^T`, which no field can produce.
    pub incompatibility: f64,
}

impl<const D: usize> AuxSolution<D> {
    /// Relative L2 residual of `div v = g0` itself.
    pub fn residual(&self) -> f64 {
        let r = self.history.last().copied().unwrap_or(0.0);
        (r * r + self.incompatibility * self.incompatibility).sqrt()
    }
}

/// Factorised `D D^T` on a fixed box.
#[derive(Debug, Clone)]
pub struct AuxSolver<const D: usize> {
    spec: GridSpec<D>,
    deriv: Vec<DMatrix<f64>>,
    basis: Vec<DMatrix<f64>>,
    eigen: Vec<Vec<f64>>,
    cutoff_eig: f64,
}

impl<const D: usize> AuxSolver<D> {
    /// Prepares the solver on the grid `spec` (typically the subgrid of `V`).
    pub fn new(spec: &GridSpec<D>) -> Result<Self> {
        let mut deriv = Vec::with_capacity(D);
        let mut basis = Vec::with_capacity(D);
        let mut eigen = Vec::with_capacity(D);
        for a in 0..D {
            let g = derivative_matrix(spec.shape()[a], spec.spacing()[a]);
            let eig = SymmetricEigen::new(&g * g.transpose());
            deriv.push(g);
            basis.push(eig.eigenvectors);
            eigen.push(eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect());
        }
        let top: f64 = eigen.iter().map(|e: &Vec<f64>| e.iter().cloned().fold(0.0, f64::max)).sum();
        Ok(Self { spec: spec.clone(), deriv, basis, eigen, cutoff_eig: 1e-11 * top })
    }

    pub fn spec(&self) -> &GridSpec<D> {
        &self.spec
    }

    fn shape(&self) -> [usize; D] {
        self.spec.shape()
    }

    /// `D v` for component arrays `v[a]`.
    fn divergence(&self, v: &[Vec<f64>]) -> Vec<f64> {
        let shape = self.shape();
        let mut out = vec![0.0; self.spec.len()];
        for a in 0..D {
            for (o, d) in out.iter_mut().zip(along_axis(&v[a], &shape, a, &self.deriv[a], false)) {
                *o += d;
            }
        }
        out
    }

    /// `D^T phi`, one array per component.
    fn divergence_transpose(&self, phi: &[f64]) -> Vec<Vec<f64>> {
        let shape = self.shape();
        (0..D).map(|a| along_axis(phi, &shape, a, &self.deriv[a], true)).collect()
    }

    /// Transpose of the one-dimensional derivative along `axis`.
    pub(crate) fn derivative_transpose(&self, data: &[f64], axis: usize) -> Vec<f64> {
        along_axis(data, &self.shape(), axis, &self.deriv[axis], true)
    }

    /// Discrete divergence of a vector field given as component arrays.
    pub(crate) fn apply_divergence(&self, v: &[Vec<f64>]) -> Vec<f64> {
        self.divergence(v)
    }

    /// Pseudo-inverse of `D D^T`; the null mode is dropped.
    pub fn apply_pinv(&self, rhs: &[f64]) -> Vec<f64> {
        let shape = self.shape();
        let mut c = rhs.to_vec();
        for a in 0..D {
            c = along_axis(&c, &shape, a, &self.basis[a], true);
        }
        for (k, v) in c.iter_mut().enumerate() {
            let idx = self.spec.multi(k);
            let lam: f64 = (0..D).map(|a| self.eigen[a][idx[a]]).sum();
            *v = if lam > self.cutoff_eig { *v / lam } else { 0.0 };
        }
        for a in 0..D {
            c = along_axis(&c, &shape, a, &self.basis[a], false);
        }
        c
    }

    /// Solves `div v = g0` with `g0` already mean-free, refining iteratively
    /// until the residual against the compatible part `P g0` is at most
    /// [`AUX_TOL`]. The incompatible part is reported, not solved for.
    pub fn solve(&self, g0: &ScalarField<D>) -> Result<AuxSolution<D>> {
        self.spec.same_as(g0.spec())?;
        let norm = l2(g0.values());
        let n = self.spec.len();
        if norm == 0.0 {
            let v = VectorField::zeros(self.spec.clone());
            return Ok(AuxSolution { v, history: vec![0.0], incompatibility: 0.0 });
        }
        let fwd = |phi: &[f64]| self.divergence(&self.divergence_transpose(phi));
        let mut phi = self.apply_pinv(g0.values());
        let rhs = fwd(&phi);
        let incompatibility = g0.values().iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / norm;
        let mut history = Vec::new();
        for _ in 0..=MAX_REFINEMENTS {
            let ax = fwd(&phi);
            let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let res = l2(&r) / norm;
            let stalled = history.last().is_some_and(|&prev| res > 0.5 * prev);
            history.push(res);
            if res <= AUX_TOL {
                let comps = self.divergence_transpose(&phi);
                let mut data = Vec::with_capacity(n * D);
                for k in 0..n {
                    for c in &comps {
                        data.push(c[k]);
                    }
                }
                let v = VectorField::from_raw(self.spec.clone(), data)?;
                return Ok(AuxSolution { v, history, incompatibility });
            }
            if stalled {
                break;
            }
            for (p, d) in phi.iter_mut().zip(self.apply_pinv(&r)) {
                *p += d;
            }
        }
        Err(Error::SolverDiverged { tol: AUX_TOL, history })
    }
}

/// Node-valued source `g(y_k) = Laplace eta Phi(x - .)` on `V`, taken as the
/// hat-function average `h^{-n} int phi_k Laplace eta Phi(x - y) dy` so that
/// the steep cutoff ramp is integrated by product quadrature.
pub(crate) struct SourceRamp<'a, const D: usize> {
    quad: &'a RampQuadrature<D>,
    len: usize,
    cell: f64,
}

impl<'a, const D: usize> SourceRamp<'a, D> {
    pub(crate) fn new(quad: &'a RampQuadrature<D>, spec: &GridSpec<D>, v: &Window<D>) -> Self {
        Self { quad, len: v.len(), cell: spec.cell_volume() }
    }

    fn kernel(x: &[f64; D], p: &RampPoint<D>) -> Result<f64> {
        let r = (0..D).map(|a| (p.y[a] - x[a]).powi(2)).sum::<f64>().sqrt();
        if r == 0.0 {
            return Err(Error::InvalidArgument(format!("evaluation point {x:?} lies where the cutoff is not flat")));
        }
        Ok(p.weight * p.lap * potential_radial(D, r))
    }

    /// Nodal source on all of `V`, without mean removal.
    pub(crate) fn source(&self, x: &[f64; D]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len];
        for p in &self.quad.points {
            let k = Self::kernel(x, p)? / self.cell;
            for &(i, w) in &p.corners {
                out[i] += w * k;
            }
        }
        Ok(out)
    }

    /// `(h^n sum_k g_k, h^n sum_k psi_k g_k)` given `psi` interpolated to
    /// the quadrature points.
    pub(crate) fn pair(&self, x: &[f64; D], psi_at_points: &[f64]) -> Result<(f64, f64)> {
        let (mut total, mut dot) = (0.0, 0.0);
        for (p, psi) in self.quad.points.iter().zip(psi_at_points) {
            let k = Self::kernel(x, p)?;
            total += k;
            dot += psi * k;
        }
        Ok((total, dot))
    }
}

/// Mean-free right-hand side `Laplace eta(y) Phi(x - y) - mean` on the subgrid of `V`.
pub fn aux_rhs<const D: usize>(
    x: &[f64; D],
    cutoff: &Cutoff<D>,
    spec: &GridSpec<D>,
    v: &Window<D>,
) -> Result<ScalarField<D>> {
    let quad = RampQuadrature::new(spec, cutoff, v, auto_ramp_order(spec, cutoff));
    let mut g = SourceRamp::new(&quad, spec, v).source(x)?;
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    for val in &mut g {
        *val -= mean;
    }
    ScalarField::from_raw(spec.subgrid(v)?, g)
}

/// Auxiliary field `v_x` on the subgrid of `V` for one evaluation point.
pub fn aux_dirichlet_solve<const D: usize>(
    x: &[f64; D],
    cutoff: &Cutoff<D>,
    spec: &GridSpec<D>,
    v: &Window<D>,
) -> Result<AuxSolution<D>> {
    let g0 = aux_rhs(x, cutoff, spec, v)?;
    AuxSolver::new(g0.spec())?.solve(&g0)
}
