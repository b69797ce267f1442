use super::energy::{strain_of_gradient, Material};
use super::matrix::{cofactor, det, identity, inverse, matmul, matvec, norm2, Matrix};
use crate::error::{Error, Result};
use crate::grid::{
    integrate, interpolate, jacobian_fd, GridField, GridSpec, ScalarField, TensorField, VectorField, Window,
};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

type PointMap<const D: usize> = Arc<dyn Fn(&[f64; D]) -> [f64; D] + Send + Sync>;
type JacobianMap<const D: usize> = Arc<dyn Fn(&[f64; D]) -> Matrix<D> + Send + Sync>;

/// Tolerance and iteration cap of the Newton inversion.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

/// A deformation given in closed form, with its Jacobian and optionally its
/// inverse.
#[derive(Clone)]
pub struct AnalyticMap<const D: usize> {
    name: String,
    map: PointMap<D>,
    jacobian: JacobianMap<D>,
    inverse: Option<PointMap<D>>,
}

impl<const D: usize> fmt::Debug for AnalyticMap<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticMap").field("name", &self.name).field("has_inverse", &self.inverse.is_some()).finish()
    }
}

impl<const D: usize> AnalyticMap<D> {
    pub fn from_fns(
        name: impl Into<String>,
        map: impl Fn(&[f64; D]) -> [f64; D] + Send + Sync + 'static,
        jacobian: impl Fn(&[f64; D]) -> Matrix<D> + Send + Sync + 'static,
        inverse: Option<PointMap<D>>,
    ) -> Self {
        Self { name: name.into(), map: Arc::new(map), jacobian: Arc::new(jacobian), inverse }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity() -> Self {
        Self::from_fns("identity", |x| *x, |_| identity(), Some(Arc::new(|y: &[f64; D]| *y)))
    }

    /// `x -> A x + b`, with the inverse when `A` is invertible.
    pub fn affine(a: Matrix<D>, b: [f64; D]) -> Self {
        let inv = inverse(&a).ok().map(|ai| {
            Arc::new(move |y: &[f64; D]| {
                let d: [f64; D] = std::array::from_fn(|k| y[k] - b[k]);
                matvec(&ai, &d)
            }) as PointMap<D>
        });
        Self::from_fns(
            "affine",
            move |x| {
                let ax = matvec(&a, x);
                std::array::from_fn(|k| ax[k] + b[k])
            },
            move |_| a,
            inv,
        )
    }

    /// Simple shear `x_1 -> x_1 + gamma x_2` (first two axes).
    pub fn shear(gamma: f64) -> Self {
        let mut a = identity::<D>();
        a[0][1] = gamma;
        let mut m = Self::affine(a, [0.0; D]);
        m.name = format!("shear({gamma})");
        m
    }

    /// `x_1 -> x_1 + a x_2^2`: volume preserving with an affine cofactor.
    pub fn quadratic_shear(a: f64) -> Self {
        Self::from_fns(
            format!("quadratic_shear({a})"),
            move |x| {
                let mut y = *x;
                y[0] += a * x[1] * x[1];
                y
            },
            move |x| {
                let mut j = identity::<D>();
                j[0][1] = 2.0 * a * x[1];
                j
            },
            Some(Arc::new(move |y: &[f64; D]| {
                let mut x = *y;
                x[0] -= a * y[1] * y[1];
                x
            })),
        )
    }

    /// Composition `self o inner`. The inverse exists when both factors have one.
    pub fn compose(&self, inner: &Self) -> Self {
        let (m1, j1) = (self.map.clone(), self.jacobian.clone());
        let (m2, m2j, j2) = (inner.map.clone(), inner.map.clone(), inner.jacobian.clone());
        let inv = match (&self.inverse, &inner.inverse) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |y: &[f64; D]| b(&a(y))) as PointMap<D>)
            }
            _ => None,
        };
        Self::from_fns(
            format!("{} o {}", self.name, inner.name),
            move |x| m1(&m2(x)),
            move |x| matmul(&j1(&m2j(x)), &j2(x)),
            inv,
        )
    }
}

impl AnalyticMap<2> {
    /// Rotation about `center` by `angle (1 - r^2/R^2)^4` inside radius `R`,
    /// the identity outside. Area preserving, with the reverse rotation as
    /// inverse.
    pub fn twist(center: [f64; 2], radius: f64, angle: f64) -> Self {
        let theta = move |x: &[f64; 2]| {
            let d = [x[0] - center[0], x[1] - center[1]];
            let s = (d[0] * d[0] + d[1] * d[1]) / (radius * radius);
            if s >= 1.0 {
                (0.0, [0.0, 0.0], d)
            } else {
                let dtds = -4.0 * angle * (1.0 - s).powi(3) / (radius * radius);
                (angle * (1.0 - s).powi(4), [2.0 * d[0] * dtds, 2.0 * d[1] * dtds], d)
            }
        };
        let rotate = move |x: &[f64; 2], sign: f64| {
            let (t, _, d) = theta(x);
            let (c, s) = ((sign * t).cos(), (sign * t).sin());
            [center[0] + c * d[0] - s * d[1], center[1] + s * d[0] + c * d[1]]
        };
        Self::from_fns(
            format!("twist({angle})"),
            move |x| rotate(x, 1.0),
            move |x| {
                let (t, g, d) = theta(x);
                let (c, s) = (t.cos(), t.sin());
                // d/dtheta of the rotated offset.
                let rd = [-s * d[0] - c * d[1], c * d[0] - s * d[1]];
                [[c + rd[0] * g[0], -s + rd[0] * g[1]], [s + rd[1] * g[0], c + rd[1] * g[1]]]
            },
            // The radius is preserved, so the inverse rotates back by the same angle.
            Some(Arc::new(move |y: &[f64; 2]| rotate(y, -1.0))),
        )
    }
}

/// A deformation either in closed form or sampled on a grid, in which case
/// its gradient is taken by finite differences and values are interpolated.
#[derive(Debug, Clone)]
pub enum Deformation<const D: usize> {
    Analytic(AnalyticMap<D>),
    Sampled { u: VectorField<D>, grad: TensorField<D> },
}

impl<const D: usize> From<AnalyticMap<D>> for Deformation<D> {
    fn from(m: AnalyticMap<D>) -> Self {
        Deformation::Analytic(m)
    }
}

impl<const D: usize> Deformation<D> {
    pub fn sampled(u: VectorField<D>) -> Result<Self> {
        let grad = jacobian_fd(&u)?;
        Ok(Deformation::Sampled { u, grad })
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, Deformation::Analytic(_))
    }

    pub fn eval(&self, x: &[f64; D]) -> Result<[f64; D]> {
        match self {
            Deformation::Analytic(m) => Ok((m.map)(x)),
            Deformation::Sampled { u, .. } => {
                let v = interpolate(u, x)?;
                Ok(std::array::from_fn(|a| v[a]))
            }
        }
    }

    pub fn jacobian(&self, x: &[f64; D]) -> Result<Matrix<D>> {
        match self {
            Deformation::Analytic(m) => Ok((m.jacobian)(x)),
            Deformation::Sampled { grad, .. } => {
                let v = interpolate(grad, x)?;
                Ok(std::array::from_fn(|i| std::array::from_fn(|j| v[i * D + j])))
            }
        }
    }

    /// `u^{-1}(y)`: closed form when available, Newton iteration from `y`
    /// otherwise.
    pub fn inverse(&self, y: &[f64; D]) -> Result<[f64; D]> {
        if let Deformation::Analytic(AnalyticMap { inverse: Some(inv), .. }) = self {
            return Ok(inv(y));
        }
        self.newton_inverse(y, y)
    }

    pub fn newton_inverse(&self, y: &[f64; D], guess: &[f64; D]) -> Result<[f64; D]> {
        self.newton_inverse_with(y, guess, NEWTON_TOL, NEWTON_MAX_ITER)
    }

    /// Newton iteration for `u(x) = y` with residual tolerance `tol`
    /// relative to `1 + |y|`.
    pub fn newton_inverse_with(&self, y: &[f64; D], guess: &[f64; D], tol: f64, max_iter: usize) -> Result<[f64; D]> {
        let mut x = *guess;
        let scale = 1.0 + y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for _ in 0..max_iter {
            let r: [f64; D] = {
                let u = self.eval(&x)?;
                std::array::from_fn(|a| u[a] - y[a])
            };
            if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= tol * scale {
                return Ok(x);
            }
            let step = matvec(&inverse(&self.jacobian(&x)?)?, &r);
            for a in 0..D {
                x[a] -= step[a];
            }
        }
        Err(Error::InversionFailed(y.to_vec()))
    }

    /// Values at every node of `domain`.
    pub fn sample(&self, domain: &GridSpec<D>) -> Result<VectorField<D>> {
        let vals: Result<Vec<[f64; D]>> = (0..domain.len()).map(|k| self.eval(&domain.point_linear(k))).collect();
        VectorField::from_raw(domain.clone(), vals?.into_iter().flatten().collect())
    }

    /// Jacobian at every node of `domain`.
    pub fn sample_jacobian(&self, domain: &GridSpec<D>) -> Result<TensorField<D>> {
        if let Deformation::Sampled { grad, .. } = self {
            if grad.spec() == domain {
                return Ok(grad.clone());
            }
        }
        let vals: Result<Vec<Matrix<D>>> =
            (0..domain.len()).into_par_iter().map(|k| self.jacobian(&domain.point_linear(k))).collect();
        TensorField::from_raw(domain.clone(), vals?.into_iter().flatten().flatten().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// `max |det grad u - 1|` over the nodes.
    pub max_det_error: f64,
    /// Node where the maximum is attained.
    pub worst_point: Vec<f64>,
    pub grad_l2: f64,
    pub cof_l2: f64,
    pub admissible: bool,
}

/// Checks `det grad u = 1` at the nodes of `domain` and that `grad u` and
/// `cof grad u` have finite L2 norms.
pub fn validate_admissible<const D: usize>(
    u: &Deformation<D>,
    domain: &GridSpec<D>,
    tol: f64,
) -> Result<AdmissibilityReport> {
    let jac = u.sample_jacobian(domain)?;
    let (mut worst, mut at, mut g2, mut c2) = (0.0f64, 0usize, 0.0, 0.0);
    for k in 0..domain.len() {
        let p = jac.at_linear(k);
        let e = (det(&p) - 1.0).abs();
        if e > worst {
            worst = e;
            at = k;
        }
        g2 += norm2(&p);
        c2 += norm2(&cofactor(&p));
    }
    let dv = domain.cell_volume();
    let (grad_l2, cof_l2) = ((g2 * dv).sqrt(), (c2 * dv).sqrt());
    Ok(AdmissibilityReport {
        max_det_error: worst,
        worst_point: domain.point_linear(at).to_vec(),
        grad_l2,
        cof_l2,
        admissible: worst <= tol && grad_l2.is_finite() && cof_l2.is_finite(),
    })
}

/// `sigma = DL(grad u) (grad u)^T` at the nodes of `domain`.
pub fn cauchy_green_strain<const D: usize>(
    u: &Deformation<D>,
    domain: &GridSpec<D>,
    m: &Material,
) -> Result<TensorField<D>> {
    let jac = u.sample_jacobian(domain)?;
    let vals: Vec<f64> =
        (0..domain.len()).flat_map(|k| strain_of_gradient(&jac.at_linear(k), m).into_iter().flatten()).collect();
    TensorField::from_raw(domain.clone(), vals)
}

/// `sigma~(y) = sigma(u^{-1}(y))` at the nodes of `target`, for `sigma`
/// given as a function on the reference domain.
pub fn pushforward_fn<const D: usize>(
    sigma: impl Fn(&[f64; D]) -> Result<Matrix<D>> + Sync,
    u: &Deformation<D>,
    target: &GridSpec<D>,
) -> Result<TensorField<D>> {
    let vals: Result<Vec<Matrix<D>>> =
        (0..target.len()).into_par_iter().map(|k| sigma(&u.inverse(&target.point_linear(k))?)).collect();
    TensorField::from_raw(target.clone(), vals?.into_iter().flatten().flatten().collect())
}

/// Push-forward of a sampled `sigma`, interpolated multilinearly at the
/// preimages of the nodes of `target`.
pub fn pushforward<const D: usize>(
    sigma: &TensorField<D>,
    u: &Deformation<D>,
    target: &GridSpec<D>,
) -> Result<TensorField<D>> {
    pushforward_fn(
        |x| {
            let v = interpolate(sigma, x)?;
            Ok(std::array::from_fn(|i| std::array::from_fn(|j| v[i * D + j])))
        },
        u,
        target,
    )
}

/// Volume of `u(W)` as `int_W det grad u`.
pub fn deformed_volume<const D: usize>(u: &Deformation<D>, domain: &GridSpec<D>, w: &Window<D>) -> Result<f64> {
    let jac = u.sample_jacobian(domain)?;
    let dets = ScalarField::from_raw(domain.clone(), (0..domain.len()).map(|k| det(&jac.at_linear(k))).collect())?;
    integrate(&dets, w)
}
