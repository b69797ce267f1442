use super::test_field::TestField;
use crate::elasticity::matrix::{det, identity, matmul, Matrix};
use crate::elasticity::{AnalyticMap, Deformation};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec, VectorField};
use rayon::prelude::*;
use std::sync::Arc;

/// Default time step of the flow integrator.
pub const DEFAULT_DT: f64 = 1.0 / 64.0;

/// Position and deformation gradient `grad_y phi(y, t)` of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState<const D: usize> {
    pub point: [f64; D],
    pub jacobian: Matrix<D>,
}

/// Flow `d phi / dt = v(phi)` of a test field, integrated with the classical
/// four-stage Runge–Kutta method together with its variational equation
/// `dJ/dt = grad v(phi) J`.
#[derive(Debug, Clone)]
pub struct FlowMap<const D: usize> {
    pub v: TestField<D>,
    pub dt: f64,
}

impl<const D: usize> FlowMap<D> {
    pub fn new(v: TestField<D>, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { v, dt })
    }

    fn rhs(&self, s: &FlowState<D>) -> ([f64; D], Matrix<D>) {
        (self.v.value(&s.point), matmul(&self.v.gradient(&s.point), &s.jacobian))
    }

    /// `phi(y, t)`. Uses `ceil(|t| / dt)` equal steps, so negative `t`
    /// integrates backwards.
    pub fn flow(&self, y: &[f64; D], t: f64) -> FlowState<D> {
        let mut s = FlowState { point: *y, jacobian: identity() };
        let steps = (t.abs() / self.dt).ceil() as usize;
        if steps == 0 {
            return s;
        }
        let h = t / steps as f64;
        let shifted = |s: &FlowState<D>, k: &([f64; D], Matrix<D>), c: f64| FlowState {
            point: std::array::from_fn(|a| s.point[a] + c * k.0[a]),
            jacobian: std::array::from_fn(|i| std::array::from_fn(|j| s.jacobian[i][j] + c * k.1[i][j])),
        };
        for _ in 0..steps {
            let k1 = self.rhs(&s);
            let k2 = self.rhs(&shifted(&s, &k1, 0.5 * h));
            let k3 = self.rhs(&shifted(&s, &k2, 0.5 * h));
            let k4 = self.rhs(&shifted(&s, &k3, h));
            for a in 0..D {
                s.point[a] += h / 6.0 * (k1.0[a] + 2.0 * k2.0[a] + 2.0 * k3.0[a] + k4.0[a]);
            }
            for i in 0..D {
                for j in 0..D {
                    s.jacobian[i][j] += h / 6.0 * (k1.1[i][j] + 2.0 * k2.1[i][j] + 2.0 * k3.1[i][j] + k4.1[i][j]);
                }
            }
        }
        s
    }

    /// `sup |det grad phi_t - 1|` over the seed points.
    pub fn volume_defect(&self, seeds: &[[f64; D]], t: f64) -> f64 {
        seeds.par_iter().map(|y| (det(&self.flow(y, t).jacobian) - 1.0).abs()).reduce(|| 0.0, f64::max)
    }

    /// `phi(., t)` as a deformation; its inverse is the flow to `-t`.
    pub fn as_map(&self, t: f64) -> AnalyticMap<D> {
        let (f1, f2, f3) = (Arc::new(self.clone()), Arc::new(self.clone()), Arc::new(self.clone()));
        AnalyticMap::from_fns(
            format!("flow of {} to t = {t}", self.v.name()),
            move |y| f1.flow(y, t).point,
            move |y| f2.flow(y, t).jacobian,
            Some(Arc::new(move |y: &[f64; D]| f3.flow(y, -t).point)),
        )
    }
}

/// `phi(y, t)` with the default time step.
pub fn flow_map<const D: usize>(v: &TestField<D>, t: f64, y: &[f64; D]) -> [f64; D] {
    FlowMap { v: v.clone(), dt: DEFAULT_DT }.flow(y, t).point
}

/// `w(., t) = phi(., t) o u`. Closed-form `u` gives a closed-form `w`; a
/// sampled `u` gives `w` sampled on the same grid.
pub fn incompressible_perturb<const D: usize>(
    u: &Deformation<D>,
    v: &TestField<D>,
    t: f64,
    dt: f64,
) -> Result<Deformation<D>> {
    let flow = FlowMap::new(v.clone(), dt)?;
    match u {
        Deformation::Analytic(m) => Ok(Deformation::Analytic(flow.as_map(t).compose(m))),
        Deformation::Sampled { u: field, .. } => {
            let spec: &GridSpec<D> = field.spec();
            let vals: Vec<f64> =
                (0..spec.len()).into_par_iter().flat_map_iter(|k| flow.flow(&field.at_linear(k), t).point).collect();
            Deformation::sampled(VectorField::from_raw(spec.clone(), vals)?)
        }
    }
}
