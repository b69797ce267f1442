#![allow(dead_code)]

use czp_core::grid::{GridSpec, ScalarField};
use czp_core::kernels::sphere_area;
use czp_core::singular_integral::{fft_nd, frequencies};
use rustfft::num_complex::Complex64;

/// `exp(-1 / (1 - s))` with `s = |x - c|^2 / r^2`.
pub fn bump<const D: usize>(x: &[f64; D], c: &[f64; D], r: f64) -> f64 {
    let s: f64 = (0..D).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>() / (r * r);
    if s < 1.0 {
        (-1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

/// Applies a Fourier multiplier to `g` zero-padded by the integer factor
/// `pad`, with forward transform `exp(-i xi x)`.
pub fn apply_multiplier<const D: usize>(
    g: &ScalarField<D>,
    pad: usize,
    symbol: impl Fn(&[f64; D]) -> Complex64,
) -> Vec<f64> {
    let spec = g.spec();
    let shape = spec.shape();
    let pshape: [usize; D] = std::array::from_fn(|a| shape[a] * pad);
    let pstride: [usize; D] = std::array::from_fn(|a| pshape[a + 1..].iter().product());
    let total: usize = pshape.iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    let place = |idx: &[usize; D]| (0..D).map(|a| idx[a] * pstride[a]).sum::<usize>();
    for k in 0..spec.len() {
        buf[place(&spec.multi(k))] = Complex64::new(g.values()[k], 0.0);
    }
    fft_nd(&mut buf, &pshape, false);
    let fr: Vec<Vec<f64>> = (0..D).map(|a| frequencies(pshape[a], spec.spacing()[a])).collect();
    for (p, v) in buf.iter_mut().enumerate() {
        let xi: [f64; D] = std::array::from_fn(|a| fr[a][(p / pstride[a]) % pshape[a]]);
        *v *= symbol(&xi);
    }
    fft_nd(&mut buf, &pshape, true);
    (0..spec.len()).map(|k| buf[place(&spec.multi(k))].re / total as f64).collect()
}

/// Principal-value convolution with `Omega_ij / |y|^n` through its symbol
/// `omega_n (xi_i xi_j / |xi|^2 - delta_ij / n)`.
pub fn cz_oracle<const D: usize>(i: usize, j: usize, g: &ScalarField<D>, pad: usize) -> Vec<f64> {
    apply_multiplier(g, pad, |xi| {
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let d = if i == j { 1.0 / D as f64 } else { 0.0 };
        Complex64::new(sphere_area(D) * (xi[i] * xi[j] / r2 - d), 0.0)
    })
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn grid2(n: usize) -> GridSpec<2> {
    GridSpec::cell_centered(n, 0.0, 1.0).unwrap()
}
