//! Pressure recovery: given `f` with `grad q = div f` on `U`, assemble `q` on
//! `W` from the local trace of `f` and four integrals against a cutoff `eta`
//! that is one on `W` and supported in `V`.
//!
//! For `x` in `W`,
//!
//! ```text
//! q(x) = tr f(x) / n - (I11 + I12 + 2 I2 + I3)(x) + const,
//! ```
//!
//! where the trace term is the point-mass part of the distributional Hessian
//! of the Newtonian potential.

mod aux;
pub mod manufactured;
mod ramp;
mod terms;

pub use aux::{aux_dirichlet_solve, aux_rhs, AuxSolution, AuxSolver, AUX_TOL};
pub use ramp::{auto_ramp_order, RAMP_SAMPLES};
pub use terms::{assemble_i11, assemble_i12, assemble_i2, assemble_i3, I3Form};

use crate::error::{Error, Result};
use crate::grid::{divergence_fd, gradient_fd, lr_norm, GridField, GridSpec, ScalarField, TensorField, Window};
use crate::kernels::{Cutoff, Mollifier};
use crate::singular_integral::{mollify_field, PvConfig};

/// Default fraction of `U` covered by `V` along each axis.
pub const DEFAULT_V_FRACTION: f64 = 0.8;
/// Default fraction of `U` covered by `W` along each axis.
pub const DEFAULT_W_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct PressureConfig {
    pub pv: PvConfig,
    pub i3_form: I3Form,
    /// Fraction of the gap between `W` and `V` used by the cutoff ramp.
    pub transition: f64,
    /// Mollify `f` at this radius before recovering.
    pub mollify: Option<f64>,
    /// Gauss points per axis in each lattice cell of the cutoff ramp;
    /// `None` picks [`auto_ramp_order`].
    pub ramp_order: Option<usize>,
}

impl Default for PressureConfig {
    fn default() -> Self {
        Self { pv: PvConfig::default(), i3_form: I3Form::default(), transition: 0.5, mollify: None, ramp_order: None }
    }
}

/// The default windows `(W, V)` for a grid.
pub fn default_windows<const D: usize>(spec: &GridSpec<D>) -> Result<(Window<D>, Window<D>)> {
    Ok((Window::central(spec, DEFAULT_W_FRACTION)?, Window::central(spec, DEFAULT_V_FRACTION)?))
}

/// Individual contributions on the subgrid of `W`.
#[derive(Debug, Clone)]
pub struct PressureTerms<const D: usize> {
    /// `tr f(x) / n`.
    pub local: ScalarField<D>,
    pub i11: ScalarField<D>,
    pub i12: ScalarField<D>,
    pub i2: ScalarField<D>,
    pub i3: ScalarField<D>,
}

#[derive(Debug, Clone)]
pub struct RecoveryReport<const D: usize> {
    /// Pressure on the subgrid of `W`, with zero mean.
    pub q: ScalarField<D>,
    pub terms: PressureTerms<D>,
    /// Relative L2(W) norm of `grad q - div f`; see [`verify_gradient`].
    pub residual: f64,
    /// Mean of the assembled `q` on `W` before it was removed.
    pub constant_gauge: f64,
    /// L2(W) norm of `q`.
    pub q_norm: f64,
    /// Window `W` in the indices of the input grid.
    pub window: Window<D>,
}

/// Recovers `q` on `W` with the product cutoff between `W` and `V`.
pub fn recover_pressure<const D: usize>(
    f: &TensorField<D>,
    w: &Window<D>,
    v: &Window<D>,
    cfg: &PressureConfig,
) -> Result<RecoveryReport<D>> {
    let cutoff = Cutoff::new(f.spec(), w, v, cfg.transition)?;
    recover_pressure_with(f, &cutoff, w, v, cfg)
}

/// Recovers `q` on `W` with a caller-supplied cutoff, which must be one and
/// flat on `W` and vanish outside `V`.
pub fn recover_pressure_with<const D: usize>(
    f: &TensorField<D>,
    cutoff: &Cutoff<D>,
    w: &Window<D>,
    v: &Window<D>,
    cfg: &PressureConfig,
) -> Result<RecoveryReport<D>> {
    let smoothed;
    let f = match cfg.mollify {
        Some(eps) => {
            smoothed = mollify_field(f, &Mollifier::new(eps)?)?;
            &smoothed
        }
        None => f,
    };
    let spec = f.spec();
    terms::check_geometry(spec, cutoff, w, v)?;

    let local_vals = w
        .indices()
        .map(|idx| {
            let t = f.at(&idx);
            (0..D).map(|a| t[a][a]).sum::<f64>() / D as f64
        })
        .collect();
    let local = ScalarField::from_raw(spec.subgrid(w)?, local_vals)?;
    let order = cfg.ramp_order.unwrap_or_else(|| auto_ramp_order(spec, cutoff));
    if order == 0 {
        return Err(Error::InvalidArgument("ramp_order must be at least 1".into()));
    }
    let (i11, i2) = terms::annulus_terms(f, cutoff, w, v, order)?;
    let i12 = assemble_i12(f, cutoff, w, v, &cfg.pv)?;
    let i3 = terms::i3_with_order(f, cutoff, w, v, cfg.i3_form, order)?;

    let raw: Vec<f64> = (0..local.values().len())
        .map(|k| local.values()[k] - (i11.values()[k] + i12.values()[k] + 2.0 * i2.values()[k] + i3.values()[k]))
        .collect();
    let gauge = raw.iter().sum::<f64>() / raw.len() as f64;
    let q = ScalarField::from_raw(local.spec().clone(), raw)?.shift(-gauge);
    let terms = PressureTerms { local, i11, i12, i2, i3 };
    let mut report = RecoveryReport {
        q_norm: lr_norm(&q, 2.0, &Window::full(q.spec()))?,
        q,
        terms,
        residual: 0.0,
        constant_gauge: gauge,
        window: *w,
    };
    report.residual = verify_gradient(&report, f)?.relative_l2;
    Ok(report)
}

/// Agreement of `grad q` with `div f` on `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientDiagnostics {
    /// `||grad q - div f||_{L2(W)} / ||div f||_{L2(W)}`, or the absolute
    /// norm when `div f` vanishes on `W`.
    pub relative_l2: f64,
    /// `max |d_a q - (div f)^a|` per component.
    pub sup: Vec<f64>,
}

/// Compares the finite-difference gradient of the recovered `q` (one-sided
/// at the edges of `W`) with the divergence of `f` on the full grid.
pub fn verify_gradient<const D: usize>(report: &RecoveryReport<D>, f: &TensorField<D>) -> Result<GradientDiagnostics> {
    gradient_mismatch(&report.q, f, &report.window)
}

/// `grad q` against `div f` for `q` sampled on the subgrid of `w`.
pub fn gradient_mismatch<const D: usize>(
    q: &ScalarField<D>,
    f: &TensorField<D>,
    w: &Window<D>,
) -> Result<GradientDiagnostics> {
    f.spec().subgrid(w)?.same_as(q.spec())?;
    let grad = gradient_fd(q)?;
    let div = divergence_fd(f)?;
    let (mut diff2, mut ref2) = (0.0, 0.0);
    let mut sup = vec![0.0f64; D];
    for (k, idx) in w.indices().enumerate() {
        let g = grad.at_linear(k);
        let d = div.at(&idx);
        for a in 0..D {
            let e = g[a] - d[a];
            diff2 += e * e;
            ref2 += d[a] * d[a];
            sup[a] = sup[a].max(e.abs());
        }
    }
    let dv = f.spec().cell_volume();
    let (diff, reference) = ((diff2 * dv).sqrt(), (ref2 * dv).sqrt());
    let relative_l2 = if reference > 0.0 { diff / reference } else { diff };
    Ok(GradientDiagnostics { relative_l2, sup })
}

/// `||q||_{L^r(W)} / ||f||_{L^r(V)}` with the Frobenius norm of `f`.
pub fn pressure_norm_bound<const D: usize>(
    q: &ScalarField<D>,
    f: &TensorField<D>,
    v: &Window<D>,
    r: f64,
) -> Result<f64> {
    let num = lr_norm(q, r, &Window::full(q.spec()))?;
    let den = lr_norm(&f.frobenius(), r, v)?;
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::InvalidArgument("f vanishes on V but q does not".into()));
    }
    Ok(num / den)
}
