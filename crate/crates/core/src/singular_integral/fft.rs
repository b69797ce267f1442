use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place multidimensional FFT of a row-major array, forward
/// (`exp(-i k x)`) or unnormalised inverse.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    for (a, &n) in shape.iter().enumerate() {
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let stride: usize = shape[a + 1..].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for base in 0..total {
            if (base / stride) % n != 0 {
                continue;
            }
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            fft.process(&mut line);
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

/// Angular frequencies of an `n`-point FFT with period `n * h`.
pub fn frequencies(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|k| {
            let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            2.0 * std::f64::consts::PI * m / l
        })
        .collect()
}
