//! End-to-end self test: manufactured pressure recovery, the kernel and
//! constitutive identities, Euler–Lagrange and Piola residuals, and the
//! ellipticity identities. Every check is recomputed from scratch.

use super::config::RunConfig;
use crate::elasticity::matrix::{cofactor, det, identity, matmul, transpose, Matrix};
use crate::elasticity::{mr_energy, mr_stress, AnalyticMap, Deformation, Material};
use crate::error::Result;
use crate::grid::{GridSpec, ScalarField, Window};
use crate::kernels::{cz_kernel, eta_phi_gradient, eta_phi_hessian, newtonian_potential, sphere_mean, Cutoff};
use crate::pressure::manufactured::{gauge_aligned_error, isotropic};
use crate::pressure::{recover_pressure, PressureConfig};
use crate::regularity::{completing_squares_check, ellipticity_criterion};
use crate::variational::{el_weak_residual, piola_check, TestField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Wall-clock seconds per criterion, in order of execution.
    #[serde(skip)]
    pub seconds: Vec<(u32, f64)>,
}

struct Checks(Vec<Check>);

impl Checks {
    /// Records `value <= bound`.
    fn at_most(&mut self, criterion: u32, name: &str, value: f64, bound: f64) {
        self.0.push(Check { criterion, name: name.into(), value, bound, passed: value <= bound });
    }

    /// Records a boolean as `0` (true) or `1` (false) against a bound of `0`.
    fn holds(&mut self, criterion: u32, name: &str, ok: bool) {
        self.at_most(criterion, name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn random_matrix<const D: usize>(rng: &mut ChaCha8Rng) -> Matrix<D> {
    std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
}

fn max_abs<const D: usize>(a: &Matrix<D>, b: &Matrix<D>) -> f64 {
    (0..D).flat_map(|i| (0..D).map(move |j| (a[i][j] - b[i][j]).abs())).fold(0.0, f64::max)
}

fn pressure_recovery(cfg: &RunConfig, out: &mut Checks) -> Result<()> {
    let run = |n: usize| -> Result<(f64, f64)> {
        let spec = GridSpec::<2>::cell_centered(n, 0.0, 1.0)?;
        let (w, v) = cfg.windows(&spec)?;
        let case = isotropic(&spec, &w, &v)?;
        let pcfg = PressureConfig { pv: cfg.pv(), ..PressureConfig::default() };
        let rep = recover_pressure(&case.f, &w, &v, &pcfg)?;
        Ok((gauge_aligned_error(&rep.q, &case.q_star, &w)?, rep.residual))
    };
    let (e64, r64) = run(64)?;
    let (e128, r128) = run(128)?;
    out.at_most(1, "gauge-aligned error at 128", e128, 0.05);
    out.at_most(1, "gradient residual at 128", r128, 0.05);
    out.at_most(1, "error ratio 128/64", e128 / e64, 1.0 - f64::EPSILON);
    out.at_most(1, "residual ratio 128/64", r128 / r64, 1.0 - f64::EPSILON);
    Ok(())
}

fn kernel_suite(cfg: &RunConfig, out: &mut Checks) -> Result<()> {
    let (mut m2, mut m3) = (0.0f64, 0.0f64);
    for i in 0..3 {
        for j in 0..3 {
            if i < 2 && j < 2 {
                m2 = m2.max(sphere_mean::<2>(|y| cz_kernel(i, j, y).unwrap()).abs());
            }
            m3 = m3.max(sphere_mean::<3>(|y| cz_kernel(i, j, y).unwrap()).abs());
        }
    }
    out.at_most(3, "sphere mean of Omega_ij, n = 2", m2, 1e-12);
    out.at_most(3, "sphere mean of Omega_ij, n = 3", m3, 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut trace = 0.0f64;
    for _ in 0..1000 {
        let y: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        trace = trace.max(((0..3).map(|i| cz_kernel(i, i, &y).unwrap()).sum::<f64>()).abs());
    }
    out.at_most(3, "trace of Omega", trace, 1e-13);

    let cutoff = Cutoff::from_bounds([0.3, 0.3], [0.7, 0.7], [0.1, 0.1], [0.9, 0.9], 0.5)?;
    out.at_most(3, "eta Phi derivatives vs differences", eta_phi_fd_error(&cutoff, &mut rng), 1e-6);
    Ok(())
}

/// Worst relative error of the analytic gradient and Hessian of
/// `eta(y) Phi(x - y)` against fourth-order differences, over 100 points in
/// the transition annulus.
fn eta_phi_fd_error(cutoff: &Cutoff<2>, rng: &mut ChaCha8Rng) -> f64 {
    let step = 1e-5;
    let value = |x: &[f64; 2], y: &[f64; 2]| cutoff.eval(y) * newtonian_potential(&[y[0] - x[0], y[1] - x[1]]).unwrap();
    let d4 = |g: &dyn Fn(&[f64; 2]) -> f64, y: &[f64; 2], a: usize| {
        let at = |s: f64| {
            let mut p = *y;
            p[a] += s * step;
            g(&p)
        };
        (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * step)
    };
    let (mut worst, mut tested) = (0.0f64, 0);
    while tested < 100 {
        let x = [rng.gen_range(0.35..0.65), rng.gen_range(0.35..0.65)];
        let y = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
        let eta = cutoff.eval(&y);
        let dist = ((y[0] - x[0]).powi(2) + (y[1] - x[1]).powi(2)).sqrt();
        if !(1e-6..1.0).contains(&eta) || dist < 0.05 {
            continue;
        }
        tested += 1;
        let g = eta_phi_gradient(&x, &y, cutoff).unwrap();
        let h = eta_phi_hessian(&x, &y, cutoff).unwrap();
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let hn = h.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        for a in 0..2 {
            worst = worst.max((d4(&|p| value(&x, p), &y, a) - g[a]).abs() / gn);
            for b in 0..2 {
                let fd = d4(&|p| eta_phi_gradient(&x, p, cutoff).unwrap()[b], &y, a);
                worst = worst.max((fd - h[a][b]).abs() / hn);
            }
        }
    }
    worst
}

fn constitutive_suite(cfg: &RunConfig, out: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let (mut adj, mut mult) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let (p, q): (Matrix<3>, Matrix<3>) = (random_matrix(&mut rng), random_matrix(&mut rng));
        let lhs = matmul(&transpose(&p), &cofactor(&p));
        let d = det(&p);
        let scale_ = 1.0 + d.abs();
        adj = adj.max(
            max_abs(&lhs, &std::array::from_fn(|i| std::array::from_fn(|j| if i == j { d } else { 0.0 }))) / scale_,
        );
        let (a, b) = (cofactor(&matmul(&p, &q)), matmul(&cofactor(&p), &cofactor(&q)));
        let s = 1.0 + a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        mult = mult.max(max_abs(&a, &b) / s);
    }
    out.at_most(5, "P^T cof P = det P Id", adj, 1e-12);
    out.at_most(5, "cof(XY) = cof X cof Y", mult, 1e-12);

    let m = cfg.material();
    let step = 1e-5;
    let mut fd = 0.0f64;
    for _ in 0..100 {
        let p: Matrix<3> = random_matrix(&mut rng);
        let dl = mr_stress(&p, &m);
        let n = dl.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..3 {
            for j in 0..3 {
                let (mut a, mut b) = (p, p);
                a[i][j] += step;
                b[i][j] -= step;
                let c = (mr_energy(&a, &m) - mr_energy(&b, &m)) / (2.0 * step);
                fd = fd.max((c - dl[i][j]).abs() / n);
            }
        }
    }
    out.at_most(5, "DL vs central differences", fd, 1e-6);
    let expect: Matrix<3> =
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { m.mu1 + 2.0 * m.mu2 } else { 0.0 }));
    out.at_most(5, "DL(Id) = (mu1 + 2 mu2) Id", max_abs(&mr_stress(&identity::<3>(), &m), &expect), 1e-10);
}

fn euler_lagrange_suite(cfg: &RunConfig, out: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 8);
    let m = cfg.material();
    let spec3 = GridSpec::<3>::cell_centered(16, 0.0, 1.0)?;
    let p = ScalarField::constant(spec3.clone(), m.mu1 + 2.0 * m.mu2)?;
    let id: Deformation<3> = AnalyticMap::identity().into();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let phi = TestField::<3>::random_divergence_free(&mut rng, 2, 0.0, 1.0)?;
        worst = worst.max(el_weak_residual(&id, &p, &phi, &m)?);
    }
    out.at_most(8, "EL residual, identity with p = mu1 + 2 mu2", worst, 1e-10);

    // Bumps wide enough for the midpoint rule to resolve their derivatives.
    let nh = Material::neo_hookean(m.mu1, m.lambda0)?;
    let spec2 = GridSpec::<2>::cell_centered(512, 0.0, 1.0)?;
    let zero = ScalarField::constant(spec2.clone(), 0.0)?;
    let shear: Deformation<2> = AnalyticMap::shear(0.5).into();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let r = rng.gen_range(0.2..0.25);
        let c = [rng.gen_range(0.45..0.55), rng.gen_range(0.45..0.55)];
        let phi = TestField::divergence_free_bump(c, r, rng.gen_range(-0.25..0.25) * r * r, [0.0; 3]);
        worst = worst.max(el_weak_residual(&shear, &zero, &phi, &nh)?);
    }
    out.at_most(8, "EL residual, neo-Hookean shear with p = 0", worst, 1e-8);

    let a = rng.gen_range(0.1..0.5);
    let b = rng.gen_range(0.1..0.5);
    let quad: Deformation<2> = AnalyticMap::from_fns(
        "quadratic",
        move |x| [x[0] + a * x[1] * x[1], x[1] + b * x[0] * x[0]],
        move |x| [[1.0, 2.0 * a * x[1]], [2.0 * b * x[0], 1.0]],
        None,
    )
    .into();
    let spec = GridSpec::<2>::cell_centered(32, 0.0, 1.0)?;
    out.at_most(8, "Piola residual, quadratic map", piola_check(&quad, &spec, &Window::full(&spec))?, 1e-10);
    Ok(())
}

fn ellipticity_suite(cfg: &RunConfig, out: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 9);
    let (mut residual, mut slack) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let lambda0 = rng.gen_range(0.1..5.0);
        let p = rng.gen_range(-lambda0..lambda0);
        let xi: Matrix<2> = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-3.0..3.0)));
        let scale_ = 1.0 + xi.iter().flatten().map(|v| v * v).sum::<f64>();
        let c = completing_squares_check(p, lambda0, &xi);
        residual = residual.max(c.residual_first.max(c.residual_mirror).max(c.residual_sum) / scale_);
        slack = slack.min(c.slack / scale_);
    }
    out.at_most(9, "completing-squares residuals", residual, 1e-12);
    out.at_most(9, "lower-bound slack (negated)", -slack, 1e-12);

    let spec = GridSpec::<2>::cell_centered(32, 0.0, 1.0)?;
    let w = Window::full(&spec);
    let p = ScalarField::from_fn(spec.clone(), |x| (3.0 * x[0]).sin() * x[1])?;
    let a = ellipticity_criterion(&p, cfg.lambda0, &w)?;
    let b = ellipticity_criterion(&p.shift(-4.5), cfg.lambda0, &w)?;
    out.at_most(9, "margin under a constant shift", (a.margin - b.margin).abs(), 1e-12);
    let step = ScalarField::from_fn(spec.clone(), |x| if x[0] < 0.5 { 0.0 } else { cfg.lambda0 })?;
    out.holds(
        9,
        "osc = lambda0 fails the strict criterion",
        !ellipticity_criterion(&step, cfg.lambda0, &w)?.criterion_met,
    );
    Ok(())
}

/// Runs the self test. The report passes when every check does.
pub fn cmd_selftest(cfg: &RunConfig) -> Result<SelftestReport> {
    let mut out = Checks(Vec::new());
    let mut seconds = Vec::new();
    let mut timed = |criterion: u32, f: &mut dyn FnMut(&mut Checks) -> Result<()>, out: &mut Checks| -> Result<()> {
        let t = Instant::now();
        f(out)?;
        seconds.push((criterion, t.elapsed().as_secs_f64()));
        Ok(())
    };
    timed(1, &mut |o| pressure_recovery(cfg, o), &mut out)?;
    timed(3, &mut |o| kernel_suite(cfg, o), &mut out)?;
    timed(
        5,
        &mut |o| {
            constitutive_suite(cfg, o);
            Ok(())
        },
        &mut out,
    )?;
    timed(8, &mut |o| euler_lagrange_suite(cfg, o), &mut out)?;
    timed(9, &mut |o| ellipticity_suite(cfg, o), &mut out)?;
    let passed = out.0.iter().all(|c| c.passed);
    Ok(SelftestReport { checks: out.0, passed, seconds })
}
