use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for k in 0..m.div_ceil(2) {
        let mut x = (PI * (k as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for l in 2..=m {
                let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 {
                1.0
            } else if m == 1 {
                x
            } else {
                p1
            };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[m - 1 - k] = x;
        weights[k] = w;
        weights[m - 1 - k] = w;
    }
    (nodes, weights)
}

/// Average of `g` over the unit sphere with default resolution.
///
/// The circle uses the periodic trapezoid rule; the 2-sphere uses
/// Gauss–Legendre in `cos(theta)` times the trapezoid rule in azimuth.
pub fn sphere_mean<const D: usize>(g: impl Fn(&[f64; D]) -> f64) -> f64 {
    sphere_mean_with(g, 64)
}

pub fn sphere_mean_with<const D: usize>(g: impl Fn(&[f64; D]) -> f64, m: usize) -> f64 {
    let mut p = [0.0; D];
    if D == 2 {
        let mut s = 0.0;
        for k in 0..m {
            let t = 2.0 * PI * k as f64 / m as f64;
            p[0] = t.cos();
            p[1] = t.sin();
            s += g(&p);
        }
        s / m as f64
    } else {
        let (z, w) = gauss_legendre(m);
        let naz = 2 * m;
        let mut s = 0.0;
        for (zi, wi) in z.iter().zip(&w) {
            let rho = (1.0 - zi * zi).sqrt();
            let mut ring = 0.0;
            for k in 0..naz {
                let t = 2.0 * PI * k as f64 / naz as f64;
                p[0] = rho * t.cos();
                p[1] = rho * t.sin();
                p[2] = *zi;
                ring += g(&p);
            }
            s += wi * ring / naz as f64;
        }
        s / 2.0
    }
}
