//! The operations behind each `czp` subcommand. Each takes decoded inputs
//! and returns serialisable reports plus any output fields, leaving file
//! handling to the binary.

use super::config::RunConfig;
use super::field_file::FieldFile;
use crate::elasticity::matrix::norm2;
use crate::elasticity::{
    cauchy_green_strain, growth_check, pushforward_fn, strain_of_gradient, validate_admissible, AnalyticMap,
    Deformation,
};
use crate::error::{Error, Result};
use crate::grid::{interpolate, lr_norm, GridField, GridSpec, ScalarField, TensorField, VectorField, Window};
use crate::hardy::{hardy_norm, hr_norm, llogl_norm};
use crate::pressure::{gradient_mismatch, recover_pressure, PressureConfig};
use crate::regularity::ellipticity_criterion;
use crate::variational::energy;
use serde::Serialize;

/// Default pass threshold of `verify` on the relative gradient mismatch.
pub const VERIFY_TOL: f64 = 0.05;

/// `max |det grad u - 1|` accepted by `elasticity`.
pub const ADMISSIBLE_TOL: f64 = 1e-8;

macro_rules! by_dim {
    ($dim:expr, $f:ident ( $($arg:expr),* )) => {
        match $dim {
            2 => $f::<2>($($arg),*),
            3 => $f::<3>($($arg),*),
            d => Err(Error::InvalidArgument(format!("dimension {d} not supported"))),
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowInfo {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl<const D: usize> From<&Window<D>> for WindowInfo {
    fn from(w: &Window<D>) -> Self {
        Self { lo: w.lo.to_vec(), hi: w.hi.to_vec() }
    }
}

/// L2(W) norms of the pieces of the representation formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermNorms {
    pub local: f64,
    pub i11: f64,
    pub i12: f64,
    pub i2: f64,
    pub i3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoverReport {
    pub dim: usize,
    pub window: WindowInfo,
    pub residual: f64,
    pub gradient_sup: Vec<f64>,
    pub constant_gauge: f64,
    pub q_norm: f64,
    pub terms: TermNorms,
}

/// Recovers `q` on `W` from the tensor field in `f`.
pub fn cmd_recover(f: &FieldFile, cfg: &RunConfig) -> Result<(FieldFile, RecoverReport)> {
    by_dim!(f.dim, recover_dim(f, cfg))
}

fn recover_dim<const D: usize>(file: &FieldFile, cfg: &RunConfig) -> Result<(FieldFile, RecoverReport)> {
    let f: TensorField<D> = file.to_field()?;
    let (w, v) = cfg.windows(f.spec())?;
    let pcfg = PressureConfig { pv: cfg.pv(), ..PressureConfig::default() };
    let rep = recover_pressure(&f, &w, &v, &pcfg)?;
    let diag = gradient_mismatch(&rep.q, &f, &w)?;
    let norm = |s: &ScalarField<D>| lr_norm(s, 2.0, &Window::full(s.spec()));
    let t = &rep.terms;
    let terms = TermNorms {
        local: norm(&t.local)?,
        i11: norm(&t.i11)?,
        i12: norm(&t.i12)?,
        i2: norm(&t.i2)?,
        i3: norm(&t.i3)?,
    };
    let report = RecoverReport {
        dim: D,
        window: (&w).into(),
        residual: rep.residual,
        gradient_sup: diag.sup,
        constant_gauge: rep.constant_gauge,
        q_norm: rep.q_norm,
        terms,
    };
    Ok((FieldFile::from_field(&rep.q), report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    /// Nodes of the `f` grid covered by `q`.
    pub window: WindowInfo,
    pub relative_l2: f64,
    pub sup: Vec<f64>,
    pub tol: f64,
    pub passed: bool,
}

/// Checks `grad q = div f` where `q` is sampled on an aligned subgrid of `f`.
pub fn cmd_verify(q: &FieldFile, f: &FieldFile, tol: f64) -> Result<VerifyReport> {
    if q.dim != f.dim {
        return Err(Error::GridMismatch(format!("q is {}-dimensional, f is {}-dimensional", q.dim, f.dim)));
    }
    by_dim!(f.dim, verify_dim(q, f, tol))
}

/// Window of `outer` occupied by `inner`, which must share its spacing and
/// sit on its nodes.
pub fn aligned_window<const D: usize>(inner: &GridSpec<D>, outer: &GridSpec<D>) -> Result<Window<D>> {
    let mut lo = [0; D];
    let mut hi = [0; D];
    for a in 0..D {
        let h = outer.spacing()[a];
        if (inner.spacing()[a] - h).abs() > 1e-12 * h {
            return Err(Error::GridMismatch(format!("axis {a}: spacing {} differs from {h}", inner.spacing()[a])));
        }
        let offset = (inner.origin()[a] - outer.origin()[a]) / h;
        let k = offset.round();
        if (offset - k).abs() > 1e-6 || k < 0.0 {
            return Err(Error::GridMismatch(format!("axis {a}: origin is not on a node of the outer grid")));
        }
        lo[a] = k as usize;
        hi[a] = lo[a] + inner.shape()[a];
        if hi[a] > outer.shape()[a] {
            return Err(Error::GridMismatch(format!("axis {a}: inner grid extends past the outer grid")));
        }
    }
    Window::new(lo, hi)
}

fn verify_dim<const D: usize>(q: &FieldFile, f: &FieldFile, tol: f64) -> Result<VerifyReport> {
    let q: ScalarField<D> = q.to_field()?;
    let f: TensorField<D> = f.to_field()?;
    let w = aligned_window(q.spec(), f.spec())?;
    let diag = gradient_mismatch(&q, &f, &w)?;
    Ok(VerifyReport {
        dim: D,
        window: (&w).into(),
        relative_l2: diag.relative_l2,
        sup: diag.sup,
        tol,
        passed: diag.relative_l2 <= tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSummary {
    /// Constant in the growth bound, `mu1 + mu2 + 1`.
    pub c: f64,
    pub min_margin: f64,
    /// Largest `max(|L|, |DL^T P|) / bound` over the nodes.
    pub max_ratio: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElasticityReport {
    pub dim: usize,
    pub deformation: String,
    pub energy: f64,
    pub max_det_error: f64,
    pub worst_point: Vec<f64>,
    pub grad_l2: f64,
    pub cof_l2: f64,
    pub admissible: bool,
    pub growth: GrowthSummary,
    pub sigma_l2: f64,
    pub sigma_tilde_l2: f64,
    /// Nodes of the deformed grid whose preimage was not found inside the
    /// sampled domain; `sigma~` is zero there.
    pub outside: usize,
}

pub struct ElasticityOutput {
    pub report: ElasticityReport,
    pub sigma: FieldFile,
    pub sigma_tilde: FieldFile,
}

/// Deformation named on the command line, or a vector field file.
pub enum DeformationSpec {
    Identity,
    Shear(f64),
    QuadraticShear(f64),
    Twist(f64),
    File(FieldFile),
}

impl DeformationSpec {
    /// `identity`, `shear:G`, `quadratic_shear:A`, `twist:ANGLE`, or a path
    /// to an `NGF1` vector field.
    pub fn parse(s: &str) -> Result<Self> {
        let num =
            |v: &str| v.parse::<f64>().map_err(|_| Error::InvalidArgument(format!("`{v}` in `{s}` is not a number")));
        match s.split_once(':') {
            None if s == "identity" => Ok(Self::Identity),
            Some(("shear", v)) => Ok(Self::Shear(num(v)?)),
            Some(("quadratic_shear", v)) => Ok(Self::QuadraticShear(num(v)?)),
            Some(("twist", v)) => Ok(Self::Twist(num(v)?)),
            _ => Ok(Self::File(FieldFile::load(s)?)),
        }
    }
}

/// Energy, admissibility, growth margins, `sigma` and its push-forward for
/// the deformation `u`. Named maps are sampled on the configured grid; the
/// twist is planar, centred in the grid box with radius 0.4 of its side.
pub fn cmd_elasticity(u: &DeformationSpec, cfg: &RunConfig) -> Result<ElasticityOutput> {
    match u {
        DeformationSpec::File(f) => by_dim!(f.dim, sampled_elasticity(f, cfg)),
        DeformationSpec::Twist(angle) => {
            let domain = cfg.grid::<2>()?;
            let (lo, hi) = (cfg.lo, cfg.hi);
            let mid = 0.5 * (lo + hi);
            let map = AnalyticMap::twist([mid, mid], 0.4 * (hi - lo), *angle);
            elasticity_on(map.name().to_string(), Deformation::Analytic(map), domain, cfg)
        }
        named => by_dim!(cfg.dim, named_elasticity(named, cfg)),
    }
}

fn named_elasticity<const D: usize>(u: &DeformationSpec, cfg: &RunConfig) -> Result<ElasticityOutput> {
    let map = match u {
        DeformationSpec::Identity => AnalyticMap::<D>::identity(),
        DeformationSpec::Shear(g) => AnalyticMap::shear(*g),
        DeformationSpec::QuadraticShear(a) => AnalyticMap::quadratic_shear(*a),
        _ => unreachable!("handled by cmd_elasticity"),
    };
    elasticity_on(map.name().to_string(), Deformation::Analytic(map), cfg.grid()?, cfg)
}

fn sampled_elasticity<const D: usize>(f: &FieldFile, cfg: &RunConfig) -> Result<ElasticityOutput> {
    let field: VectorField<D> = f.to_field()?;
    let domain = field.spec().clone();
    elasticity_on("sampled".into(), Deformation::sampled(field)?, domain, cfg)
}

fn elasticity_on<const D: usize>(
    name: String,
    u: Deformation<D>,
    domain: GridSpec<D>,
    cfg: &RunConfig,
) -> Result<ElasticityOutput> {
    let m = cfg.material();
    let adm = validate_admissible(&u, &domain, ADMISSIBLE_TOL)?;
    let jac = u.sample_jacobian(&domain)?;
    let c = m.mu1 + m.mu2 + 1.0;
    let (mut min_margin, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for k in 0..domain.len() {
        let g = growth_check(&jac.at_linear(k), &m, c);
        min_margin = min_margin.min(g.margin);
        max_ratio = max_ratio.max(g.energy.max(g.strain) / g.bound);
    }
    let growth = GrowthSummary { c, min_margin, max_ratio, holds: min_margin >= 0.0 };

    let sigma = cauchy_green_strain(&u, &domain, &m)?;
    let mut outside = 0;
    let sigma_tilde = if u.is_analytic() {
        pushforward_fn(|x| Ok(strain_of_gradient(&u.jacobian(x)?, &m)), &u, &domain)?
    } else {
        // Target nodes are the nodes of the sampled grid; a preimage that
        // leaves the grid or fails to converge contributes zero.
        let mut vals = Vec::with_capacity(domain.len() * D * D);
        for k in 0..domain.len() {
            let y = domain.point_linear(k);
            let s = u.newton_inverse_with(&y, &y, cfg.tol, cfg.max_iter).and_then(|x| interpolate(&sigma, &x));
            match s {
                Ok(v) => vals.extend(v),
                Err(Error::OutOfDomain(_)) | Err(Error::InversionFailed(_)) => {
                    outside += 1;
                    vals.extend(std::iter::repeat(0.0).take(D * D));
                }
                Err(e) => return Err(e),
            }
        }
        TensorField::from_raw(domain.clone(), vals)?
    };
    let l2 = |t: &TensorField<D>| {
        let s: f64 = (0..domain.len()).map(|k| norm2(&t.at_linear(k))).sum();
        (s * domain.cell_volume()).sqrt()
    };
    let report = ElasticityReport {
        dim: D,
        deformation: name,
        energy: energy(&u, &domain, &m)?,
        max_det_error: adm.max_det_error,
        worst_point: adm.worst_point,
        grad_l2: adm.grad_l2,
        cof_l2: adm.cof_l2,
        admissible: adm.admissible,
        growth,
        sigma_l2: l2(&sigma),
        sigma_tilde_l2: l2(&sigma_tilde),
        outside,
    };
    Ok(ElasticityOutput {
        report,
        sigma: FieldFile::from_field(&sigma),
        sigma_tilde: FieldFile::from_field(&sigma_tilde),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EllipticityOutput {
    pub dim: usize,
    pub lambda0: f64,
    pub window: WindowInfo,
    pub osc: f64,
    pub margin: f64,
    pub criterion_met: bool,
    pub mu0_feasible: Option<f64>,
}

/// Oscillation criterion for the scalar field `p` on the central window
/// covering `fraction` of each axis, or the whole grid.
pub fn cmd_ellipticity(p: &FieldFile, lambda0: f64, fraction: Option<f64>) -> Result<EllipticityOutput> {
    by_dim!(p.dim, ellipticity_dim(p, lambda0, fraction))
}

fn ellipticity_dim<const D: usize>(p: &FieldFile, lambda0: f64, fraction: Option<f64>) -> Result<EllipticityOutput> {
    let p: ScalarField<D> = p.to_field()?;
    let w = match fraction {
        Some(f) => Window::central(p.spec(), f)?,
        None => Window::full(p.spec()),
    };
    let r = ellipticity_criterion(&p, lambda0, &w)?;
    Ok(EllipticityOutput {
        dim: D,
        lambda0,
        window: (&w).into(),
        osc: r.osc,
        margin: r.margin,
        criterion_met: r.criterion_met,
        mu0_feasible: r.mu0_feasible,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyRow {
    /// Component index within the node, `0` for scalar fields.
    pub component: usize,
    pub lr: f64,
    pub hr: f64,
    pub hardy: f64,
    /// `int |f| log(2 + |f|)`.
    pub llogl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport {
    pub dim: usize,
    pub r: f64,
    /// The window `V` from the run configuration.
    pub window: WindowInfo,
    pub rows: Vec<HardyRow>,
}

/// Local Hardy diagnostics of every component of `f` on `V`.
pub fn cmd_hardy(f: &FieldFile, r: f64, cfg: &RunConfig) -> Result<HardyReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be at least 1, got {r}")));
    }
    by_dim!(f.dim, hardy_dim(f, r, cfg))
}

fn hardy_dim<const D: usize>(f: &FieldFile, r: f64, cfg: &RunConfig) -> Result<HardyReport> {
    let spec = f.grid::<D>()?;
    let (_, v) = cfg.windows(&spec)?;
    let mut rows = Vec::with_capacity(f.components);
    for c in 0..f.components {
        let vals = f.data.iter().skip(c).step_by(f.components).cloned().collect();
        let s = ScalarField::from_raw(spec.clone(), vals)?;
        rows.push(HardyRow {
            component: c,
            lr: lr_norm(&s, r, &v)?,
            hr: hr_norm(&s, r, &v)?,
            hardy: hardy_norm(&s, r, &v)?,
            llogl: llogl_norm(&s.map(f64::abs)?, &v)?,
        });
    }
    Ok(HardyReport { dim: D, r, window: (&v).into(), rows })
}
