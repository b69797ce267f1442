use crate::elasticity::Matrix;
use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;
use std::sync::Arc;

type ValueFn<const D: usize> = Arc<dyn Fn(&[f64; D]) -> [f64; D] + Send + Sync>;
type GradFn<const D: usize> = Arc<dyn Fn(&[f64; D]) -> Matrix<D> + Send + Sync>;

/// Smooth vector field with closed-form gradient `(grad v)^i_j = d_j v^i`.
#[derive(Clone)]
pub struct TestField<const D: usize> {
    name: String,
    value: ValueFn<D>,
    grad: GradFn<D>,
    divergence_free: bool,
    /// Ball containing the support, if compact.
    support: Option<([f64; D], f64)>,
}

impl<const D: usize> fmt::Debug for TestField<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestField")
            .field("name", &self.name)
            .field("divergence_free", &self.divergence_free)
            .field("support", &self.support)
            .finish()
    }
}

/// `psi(x) = exp(1 - 1/(1 - s))`, `s = |x - c|^2 / R^2`, with gradient and Hessian.
fn bump_jet<const D: usize>(x: &[f64; D], c: &[f64; D], r: f64) -> (f64, [f64; D], Matrix<D>) {
    let d: [f64; D] = std::array::from_fn(|a| x[a] - c[a]);
    let s = d.iter().map(|v| v * v).sum::<f64>() / (r * r);
    if s >= 1.0 {
        return (0.0, [0.0; D], [[0.0; D]; D]);
    }
    let u = 1.0 - s;
    let b = (1.0 - 1.0 / u).exp();
    let b1 = -b / (u * u);
    let b2 = b * (1.0 / u.powi(4) - 2.0 / u.powi(3));
    let r2 = r * r;
    let grad = std::array::from_fn(|a| b1 * 2.0 * d[a] / r2);
    let hess = std::array::from_fn(|a| {
        std::array::from_fn(|k| b2 * 4.0 * d[a] * d[k] / (r2 * r2) + if a == k { b1 * 2.0 / r2 } else { 0.0 })
    });
    (b, grad, hess)
}

/// `e_{ijk}` for indices in `0..3`.
fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl<const D: usize> TestField<D> {
    pub fn from_fns(
        name: impl Into<String>,
        value: impl Fn(&[f64; D]) -> [f64; D] + Send + Sync + 'static,
        grad: impl Fn(&[f64; D]) -> Matrix<D> + Send + Sync + 'static,
        divergence_free: bool,
        support: Option<([f64; D], f64)>,
    ) -> Self {
        Self { name: name.into(), value: Arc::new(value), grad: Arc::new(grad), divergence_free, support }
    }

    /// `v = curl(A psi e)` for an axis `e` in 3D, and the rotated gradient
    /// `A (d_2 psi, -d_1 psi)` in 2D, where `e` is ignored. Exactly
    /// divergence free and supported in the ball of radius `radius`.
    pub fn divergence_free_bump(center: [f64; D], radius: f64, amplitude: f64, axis: [f64; 3]) -> Self {
        assert!(D == 2 || D == 3, "test fields are defined in dimensions 2 and 3");
        // v_i = sum ε_{ijk} d_j psi e_k, with e = (0, 0, 1) in 2D.
        let e = if D == 2 { [0.0, 0.0, 1.0] } else { axis };
        let weights = move |i: usize, j: usize| {
            if D == 2 {
                levi_civita(i, j, 2)
            } else {
                (0..3).map(|k| levi_civita(i, j, k) * e[k]).sum()
            }
        };
        Self::from_fns(
            "divergence-free bump",
            move |x| {
                let (_, g, _) = bump_jet(x, &center, radius);
                std::array::from_fn(|i| amplitude * (0..D).map(|j| weights(i, j) * g[j]).sum::<f64>())
            },
            move |x| {
                let (_, _, h) = bump_jet(x, &center, radius);
                std::array::from_fn(|i| {
                    std::array::from_fn(|m| amplitude * (0..D).map(|j| weights(i, j) * h[j][m]).sum::<f64>())
                })
            },
            true,
            Some((center, radius)),
        )
    }

    /// `v = A (x - c) psi`, compactly supported with nonzero divergence.
    pub fn radial_bump(center: [f64; D], radius: f64, amplitude: f64) -> Self {
        Self::from_fns(
            "radial bump",
            move |x| {
                let (b, _, _) = bump_jet(x, &center, radius);
                std::array::from_fn(|a| amplitude * (x[a] - center[a]) * b)
            },
            move |x| {
                let (b, g, _) = bump_jet(x, &center, radius);
                std::array::from_fn(|i| {
                    std::array::from_fn(|j| amplitude * ((x[i] - center[i]) * g[j] + if i == j { b } else { 0.0 }))
                })
            },
            false,
            Some((center, radius)),
        )
    }

    /// Constant field `c`, not compactly supported.
    pub fn constant(c: [f64; D]) -> Self {
        Self::from_fns("constant", move |_| c, |_| [[0.0; D]; D], true, None)
    }

    /// `sum_k fields[k]`; divergence free when every summand is. The support
    /// ball is dropped.
    pub fn sum(fields: &[TestField<D>]) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidArgument("empty sum of test fields".into()));
        }
        let parts: Vec<TestField<D>> = fields.to_vec();
        let grads = parts.clone();
        let div_free = parts.iter().all(|f| f.divergence_free);
        let compact = parts.iter().all(|f| f.support.is_some());
        let mut field = Self::from_fns(
            "sum",
            move |x| {
                let mut out = [0.0; D];
                for f in &parts {
                    let v = f.value(x);
                    for a in 0..D {
                        out[a] += v[a];
                    }
                }
                out
            },
            move |x| {
                let mut out = [[0.0; D]; D];
                for f in &grads {
                    let g = f.gradient(x);
                    for i in 0..D {
                        for j in 0..D {
                            out[i][j] += g[i][j];
                        }
                    }
                }
                out
            },
            div_free,
            None,
        );
        if compact {
            // Smallest ball around the first centre that covers every summand.
            let c = fields[0].support.unwrap().0;
            let r = fields
                .iter()
                .map(|f| {
                    let (cc, rr) = f.support.unwrap();
                    (0..D).map(|a| (cc[a] - c[a]).powi(2)).sum::<f64>().sqrt() + rr
                })
                .fold(0.0, f64::max);
            field.support = Some((c, r));
        }
        Ok(field)
    }

    /// Sum of `count` divergence-free bumps with centres and radii drawn so
    /// that every support lies inside `[lo, hi]^D`. Amplitudes scale like
    /// `radius^2`, which keeps `|grad v|` of order one.
    pub fn random_divergence_free(rng: &mut impl Rng, count: usize, lo: f64, hi: f64) -> Result<Self> {
        let width = hi - lo;
        if !(width > 0.0) {
            return Err(Error::InvalidArgument(format!("empty box [{lo}, {hi}]")));
        }
        let fields: Vec<TestField<D>> = (0..count.max(1))
            .map(|_| {
                let radius = width * rng.gen_range(0.15..0.3);
                let center = std::array::from_fn(|_| rng.gen_range(lo + radius..hi - radius));
                let amplitude = rng.gen_range(-0.25..0.25) * radius * radius;
                let mut axis = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let n = axis.iter().map(|v: &f64| v * v).sum::<f64>().sqrt().max(1e-12);
                axis.iter_mut().for_each(|v| *v /= n);
                TestField::divergence_free_bump(center, radius, amplitude, axis)
            })
            .collect();
        Self::sum(&fields)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: &[f64; D]) -> [f64; D] {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64; D]) -> Matrix<D> {
        (self.grad)(x)
    }

    pub fn divergence(&self, x: &[f64; D]) -> f64 {
        let g = self.gradient(x);
        (0..D).map(|a| g[a][a]).sum()
    }

    pub fn is_divergence_free(&self) -> bool {
        self.divergence_free
    }

    pub fn support(&self) -> Option<([f64; D], f64)> {
        self.support
    }
}

impl TestField<2> {
    /// Rigid rotation generator `(-y_2, y_1)`.
    pub fn rotation() -> Self {
        Self::from_fns("rotation", |y| [-y[1], y[0]], |_| [[0.0, -1.0], [1.0, 0.0]], true, None)
    }
}
