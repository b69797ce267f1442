//! First variation of the energy along divergence-free flows, the pressure
//! integral identity, the weak Euler–Lagrange residual and the Piola identity.

mod flow;
mod test_field;

pub use flow::{flow_map, incompressible_perturb, FlowMap, FlowState, DEFAULT_DT};
pub use test_field::TestField;

use crate::elasticity::matrix::{cofactor, contract, matmul, scale, Matrix};
use crate::elasticity::{mr_energy, mr_stress, Deformation, Material};
use crate::error::Result;
use crate::grid::{divergence_fd, GridField, GridSpec, ScalarField, TensorField, Window};
use rayon::prelude::*;

/// Midpoint sum of `g` over the nodes of `domain`, in node order.
fn node_sum<const D: usize>(domain: &GridSpec<D>, g: impl Fn(usize) -> Result<f64> + Sync + Send) -> Result<f64> {
    let vals: Result<Vec<f64>> = (0..domain.len()).into_par_iter().map(g).collect();
    Ok(vals?.iter().sum::<f64>() * domain.cell_volume())
}

/// `E[u] = int L(grad u)` over `domain`.
pub fn energy<const D: usize>(u: &Deformation<D>, domain: &GridSpec<D>, m: &Material) -> Result<f64> {
    let jac = u.sample_jacobian(domain)?;
    node_sum(domain, |k| Ok(mr_energy(&jac.at_linear(k), m)))
}

/// `int_Omega DL(grad u) : grad(v o u) dx` with
/// `grad(v o u) = (grad v)(u(x)) grad u(x)`.
pub fn first_variation<const D: usize>(
    u: &Deformation<D>,
    v: &TestField<D>,
    domain: &GridSpec<D>,
    m: &Material,
) -> Result<f64> {
    let jac = u.sample_jacobian(domain)?;
    node_sum(domain, |k| {
        let p = jac.at_linear(k);
        let y = u.eval(&domain.point_linear(k))?;
        Ok(contract(&mr_stress(&p, m), &matmul(&v.gradient(&y), &p)))
    })
}

/// `|int_Omega DL(grad u) : grad(v o u) dx - int q div v dy|`, with `q`
/// sampled on a grid of the deformed domain. For divergence-free `v` the
/// right side is zero and this is `|first_variation|`.
pub fn pressure_identity_residual<const D: usize>(
    u: &Deformation<D>,
    q: &ScalarField<D>,
    v: &TestField<D>,
    domain: &GridSpec<D>,
    m: &Material,
) -> Result<f64> {
    let lhs = first_variation(u, v, domain, m)?;
    let rhs = if v.is_divergence_free() {
        0.0
    } else {
        let spec = q.spec();
        node_sum(spec, |k| Ok(q.values()[k] * v.divergence(&spec.point_linear(k))))?
    };
    Ok((lhs - rhs).abs())
}

/// `|int_Omega (DL(grad u) - p cof grad u) : grad phi dx|` over the grid of `p`.
pub fn el_weak_residual<const D: usize>(
    u: &Deformation<D>,
    p: &ScalarField<D>,
    phi: &TestField<D>,
    m: &Material,
) -> Result<f64> {
    let domain = p.spec();
    let jac = u.sample_jacobian(domain)?;
    let total = node_sum(domain, |k| {
        let g = jac.at_linear(k);
        let a = mr_stress(&g, m);
        let b = scale(p.values()[k], &cofactor(&g));
        let diff: Matrix<D> = std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]));
        Ok(contract(&diff, &phi.gradient(&domain.point_linear(k))))
    })?;
    Ok(total.abs())
}

/// L2 norm over `w` of the finite-difference row divergence of `cof grad u`.
pub fn piola_check<const D: usize>(u: &Deformation<D>, domain: &GridSpec<D>, w: &Window<D>) -> Result<f64> {
    w.check_within(domain)?;
    let jac = u.sample_jacobian(domain)?;
    let cof = TensorField::from_raw(
        domain.clone(),
        (0..domain.len()).flat_map(|k| cofactor(&jac.at_linear(k)).into_iter().flatten()).collect(),
    )?;
    let div = divergence_fd(&cof)?;
    let mut sum = 0.0;
    for idx in w.indices() {
        sum += div.at(&idx).iter().map(|v| v * v).sum::<f64>();
    }
    Ok((sum * domain.cell_volume()).sqrt())
}
