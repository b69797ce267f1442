use super::lattice::Correlator;
use super::moments::cell_moments;
use super::{NearCellRule, PvConfig};
use crate::error::{Error, Result};
use crate::grid::{GridField, GridSpec, ScalarField, Window};
use crate::kernels::{smoothstep, sphere_mean_with};
use rayon::prelude::*;

/// Largest sphere mean accepted for a principal-value kernel.
const MEAN_TOL: f64 = 1e-8;

/// Degree-zero kernel `K`; the convolution kernel is `K(y) / |y|^n`.
pub type Kernel<'a, const D: usize> = &'a (dyn Fn(&[f64; D]) -> f64 + Sync);

/// Result of a principal-value convolution with its truncation diagnostics.
#[derive(Debug, Clone)]
pub struct PvOutcome<const D: usize> {
    pub field: ScalarField<D>,
    /// One field per truncation radius, in the order of `delta_seq`.
    pub levels: Vec<ScalarField<D>>,
    /// `max |field - finest level|`; zero without extrapolation.
    pub extrapolation_gap: f64,
}

/// `T g(x) = lim_{delta -> 0} int_{|y| >= delta} K(y) / |y|^n g(x - y) dy`
/// for `x` in `eval`, with `g` extended by zero outside the grid.
pub fn pv_convolve<const D: usize>(
    kernel: Kernel<'_, D>,
    g: &ScalarField<D>,
    eval: &Window<D>,
    cfg: &PvConfig,
) -> Result<ScalarField<D>> {
    Ok(pv_convolve_report(&[(kernel, g)], eval, cfg)?.field)
}

/// `sum_k T_k g_k` evaluated in one pass.
pub fn pv_convolve_many<const D: usize>(
    terms: &[(Kernel<'_, D>, &ScalarField<D>)],
    eval: &Window<D>,
    cfg: &PvConfig,
) -> Result<ScalarField<D>> {
    Ok(pv_convolve_report(terms, eval, cfg)?.field)
}

fn full_kernel<const D: usize>(kernel: Kernel<'_, D>) -> impl Fn(&[f64; D]) -> f64 + '_ {
    move |y: &[f64; D]| {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        kernel(y) / r.powi(D as i32)
    }
}

/// Smooth radial taper: 1 for `|r| <= R/2`, 0 for `|r| >= R`.
fn taper(r: f64, radius: f64) -> f64 {
    1.0 - smoothstep((r - 0.5 * radius) / (0.5 * radius)).0
}

fn sample<const D: usize>(g: &ScalarField<D>, idx: &[usize; D], off: &[isize; D]) -> f64 {
    let spec = g.spec();
    let mut j = [0usize; D];
    for a in 0..D {
        let v = idx[a] as isize + off[a];
        if v < 0 || v >= spec.shape()[a] as isize {
            return 0.0;
        }
        j[a] = v as usize;
    }
    g.values()[spec.linear(&j)]
}

/// Centred-difference gradient and Hessian of `g` at a node.
fn taylor_jet<const D: usize>(g: &ScalarField<D>, idx: &[usize; D]) -> ([f64; D], [[f64; D]; D]) {
    let h = g.spec().spacing();
    let c = sample(g, idx, &[0; D]);
    let mut grad = [0.0; D];
    let mut hess = [[0.0; D]; D];
    let unit = |a: usize, s: isize| {
        let mut o = [0isize; D];
        o[a] = s;
        o
    };
    for a in 0..D {
        let p = sample(g, idx, &unit(a, 1));
        let m = sample(g, idx, &unit(a, -1));
        grad[a] = (p - m) / (2.0 * h[a]);
        hess[a][a] = (p - 2.0 * c + m) / (h[a] * h[a]);
        for b in a + 1..D {
            let mut o = [0isize; D];
            let mut corner = |sa: isize, sb: isize| {
                o[a] = sa;
                o[b] = sb;
                sample(g, idx, &o)
            };
            let v = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (4.0 * h[a] * h[b]);
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    (grad, hess)
}

/// Lattice offsets with `|o h| < radius`.
fn offsets_within<const D: usize>(h: &[f64; D], radius: f64) -> Vec<[isize; D]> {
    let reach: [isize; D] = std::array::from_fn(|a| (radius / h[a]).ceil() as isize);
    let count: usize = reach.iter().map(|&r| (2 * r + 1) as usize).product();
    let mut out = Vec::new();
    for mut k in 0..count {
        let mut o = [0isize; D];
        for a in (0..D).rev() {
            let w = (2 * reach[a] + 1) as usize;
            o[a] = (k % w) as isize - reach[a];
            k /= w;
        }
        let r2: f64 = (0..D).map(|a| (o[a] as f64 * h[a]).powi(2)).sum();
        if r2 < radius * radius {
            out.push(o);
        }
    }
    out
}

/// Value at `s = 0` of the polynomial through `(s_k, v_k)`.
fn extrapolate_to_zero(s: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..s.len() {
        let mut l = 1.0;
        for j in 0..s.len() {
            if i != j {
                l *= s[j] / (s[j] - s[i]);
            }
        }
        acc += l * v[i];
    }
    acc
}

struct Level<const D: usize> {
    /// Cells inside the truncation radius other than the origin.
    ring: Vec<[isize; D]>,
    /// `sum_{|o| >= delta} taper(o) K(o) / |o|^n h^n`, per kernel.
    taper_sums: Vec<f64>,
    /// Excluded-region moments, per kernel.
    moments: Vec<([f64; D], [[f64; D]; D])>,
    s: f64,
}

/// Per-point level values and the extrapolated value.
struct PointValues {
    levels: Vec<Vec<f64>>,
    value: Vec<f64>,
    gap: f64,
}

fn evaluate<const D: usize>(
    terms: &[(Kernel<'_, D>, &ScalarField<D>)],
    points: &[[usize; D]],
    cfg: &PvConfig,
) -> Result<PointValues> {
    cfg.validate()?;
    if terms.is_empty() {
        return Err(Error::InvalidArgument("no kernel terms given".into()));
    }
    let spec: GridSpec<D> = terms[0].1.spec().clone();
    for (_, g) in terms {
        spec.same_as(g.spec())?;
    }
    for (k, _) in terms {
        let mean = sphere_mean_with(*k, 256);
        if !(mean.abs() <= MEAN_TOL) {
            return Err(Error::KernelNotMeanZero { mean });
        }
    }
    let nl = cfg.delta_seq.len();
    if points.is_empty() {
        return Ok(PointValues { levels: Vec::new(), value: Vec::new(), gap: 0.0 });
    }
    let shape = spec.shape();
    let mut lo = shape;
    let mut hi = [0usize; D];
    for p in points {
        for a in 0..D {
            if p[a] >= shape[a] {
                return Err(Error::InvalidWindow(format!("point {p:?} outside grid {shape:?}")));
            }
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a] + 1);
        }
    }
    let bounds = Window { lo, hi };
    let gs: Vec<&ScalarField<D>> = terms.iter().map(|t| t.1).collect();
    let h = spec.spacing();
    let dv = spec.cell_volume();
    let hmin = h.iter().cloned().fold(f64::INFINITY, f64::min);
    let hmax = h.iter().cloned().fold(0.0, f64::max);
    let kernels: Vec<_> = terms.iter().map(|t| full_kernel(t.0)).collect();

    let corr = Correlator::new(&spec, &bounds, &gs, |o, out| {
        if o.iter().all(|&c| c == 0) {
            out.fill(0.0);
            return;
        }
        let y: [f64; D] = std::array::from_fn(|a| o[a] as f64 * h[a]);
        for (k, kern) in kernels.iter().enumerate() {
            out[k] = kern(&y) * dv;
        }
    });
    let Some(corr) = corr else {
        let zeros = vec![0.0; points.len()];
        return Ok(PointValues { levels: vec![zeros.clone(); nl], value: zeros, gap: 0.0 });
    };

    let taper_radius = 8.0 * hmax;
    let taper_cells = offsets_within(&h, taper_radius);
    let levels: Vec<Level<D>> = cfg
        .delta_seq
        .iter()
        .map(|&delta| {
            let radius = delta * hmin;
            let excluded = offsets_within(&h, radius);
            let ring: Vec<[isize; D]> = excluded.iter().copied().filter(|o| o.iter().any(|&c| c != 0)).collect();
            let taper_sums = kernels
                .iter()
                .map(|kern| {
                    taper_cells
                        .iter()
                        .filter_map(|o| {
                            let y: [f64; D] = std::array::from_fn(|a| o[a] as f64 * h[a]);
                            let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                            (r >= radius).then(|| taper(r, taper_radius) * kern(&y) * dv)
                        })
                        .sum()
                })
                .collect();
            let moments = match cfg.near_cell_rule {
                NearCellRule::Skip => Vec::new(),
                NearCellRule::TaylorCell => kernels.iter().map(|kern| cell_moments(kern, &h, &excluded)).collect(),
            };
            Level { ring, taper_sums, moments, s: radius * radius }
        })
        .collect();

    let values: Vec<Vec<f64>> = points
        .par_iter()
        .map(|x| {
            let total = corr.at(x);
            levels
                .iter()
                .map(|lv| {
                    let mut v = total;
                    for o in &lv.ring {
                        let y: [f64; D] = std::array::from_fn(|a| o[a] as f64 * h[a]);
                        let neg: [isize; D] = std::array::from_fn(|a| -o[a]);
                        for (k, kern) in kernels.iter().enumerate() {
                            v -= kern(&y) * dv * sample(gs[k], x, &neg);
                        }
                    }
                    for (k, g) in gs.iter().enumerate() {
                        v -= g.values()[spec.linear(x)] * lv.taper_sums[k];
                    }
                    for (k, (m1, m2)) in lv.moments.iter().enumerate() {
                        let (grad, hess) = taylor_jet(gs[k], x);
                        for a in 0..D {
                            v -= grad[a] * m1[a];
                            for b in 0..D {
                                v += 0.5 * hess[a][b] * m2[a][b];
                            }
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();

    let per_level: Vec<Vec<f64>> = (0..nl).map(|l| values.iter().map(|v| v[l]).collect()).collect();
    if cfg.extrapolate {
        let s: Vec<f64> = levels.iter().map(|l| l.s).collect();
        let value: Vec<f64> = values.iter().map(|v| extrapolate_to_zero(&s, v)).collect();
        let gap = value.iter().zip(&values).map(|(e, v)| (e - v[nl - 1]).abs()).fold(0.0, f64::max);
        Ok(PointValues { levels: per_level, value, gap })
    } else {
        let value = per_level[nl - 1].clone();
        Ok(PointValues { levels: per_level, value, gap: 0.0 })
    }
}

/// Principal-value convolution evaluated at a list of grid nodes.
pub fn pv_convolve_points<const D: usize>(
    kernel: Kernel<'_, D>,
    g: &ScalarField<D>,
    points: &[[usize; D]],
    cfg: &PvConfig,
) -> Result<Vec<f64>> {
    Ok(evaluate(&[(kernel, g)], points, cfg)?.value)
}

pub fn pv_convolve_report<const D: usize>(
    terms: &[(Kernel<'_, D>, &ScalarField<D>)],
    eval: &Window<D>,
    cfg: &PvConfig,
) -> Result<PvOutcome<D>> {
    let spec = terms.first().ok_or_else(|| Error::InvalidArgument("no kernel terms given".into()))?.1.spec();
    let out_spec = spec.subgrid(eval)?;
    let points: Vec<[usize; D]> = eval.indices().collect();
    let pv = evaluate(terms, &points, cfg)?;
    let levels =
        pv.levels.into_iter().map(|l| ScalarField::from_raw(out_spec.clone(), l)).collect::<Result<Vec<_>>>()?;
    let field = ScalarField::from_raw(out_spec, pv.value)?;
    Ok(PvOutcome { field, levels, extrapolation_gap: pv.gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::cz_kernel;

    #[test]
    fn lagrange_extrapolation_is_exact_on_quadratics_in_s() {
        let s = [16.0, 4.0, 1.0];
        let v: Vec<f64> = s.iter().map(|x| 3.0 + 2.0 * x - 0.5 * x * x).collect();
        assert!((extrapolate_to_zero(&s, &v) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_kernel_with_nonzero_mean() {
        let g = ScalarField::constant(GridSpec::<2>::cell_centered(8, 0.0, 1.0).unwrap(), 1.0).unwrap();
        let w = Window::new([2, 2], [6, 6]).unwrap();
        let k = |y: &[f64; 2]| y[0] * y[0] / (y[0] * y[0] + y[1] * y[1]);
        let res = pv_convolve(&k, &g, &w, &PvConfig::default());
        assert!(matches!(res, Err(Error::KernelNotMeanZero { .. })));
    }

    #[test]
    fn zero_input_gives_zero() {
        let spec = GridSpec::<2>::cell_centered(16, 0.0, 1.0).unwrap();
        let g = ScalarField::zeros(spec);
        let w = Window::new([4, 4], [12, 12]).unwrap();
        let k = |y: &[f64; 2]| cz_kernel(0, 1, y).unwrap();
        assert_eq!(pv_convolve(&k, &g, &w, &PvConfig::default()).unwrap().max_abs(), 0.0);
    }
}
