use super::fft::{fft_nd, frequencies};
use super::{pv_convolve, pv_convolve_points, PvConfig};
use crate::error::{Error, Result};
use crate::grid::{GridField, ScalarField, Window};
use crate::kernels::riesz_constant;
use rustfft::num_complex::Complex64;

/// How a Riesz transform is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum RieszMethod {
    /// Fourier multiplier on the grid padded by `padding` times its extent
    /// with zeros (0 treats the field as periodic).
    Spectral { padding: f64 },
    /// Principal-value quadrature of the kernel `c_n y_j / |y|^{n+1}`.
    Pv(PvConfig),
}

impl Default for RieszMethod {
    fn default() -> Self {
        RieszMethod::Spectral { padding: 0.5 }
    }
}

fn check_axis<const D: usize>(j: usize) -> Result<()> {
    if j >= D {
        return Err(Error::InvalidArgument(format!("axis {j} out of range for dimension {D}")));
    }
    Ok(())
}

/// `R_j f` over the whole grid.
pub fn riesz_transform<const D: usize>(j: usize, f: &ScalarField<D>, method: &RieszMethod) -> Result<ScalarField<D>> {
    match method {
        RieszMethod::Spectral { padding } => riesz_spectral(j, f, *padding),
        RieszMethod::Pv(cfg) => riesz_pv(j, f, &Window::full(f.spec()), cfg),
    }
}

/// Spectral Riesz transform. With the forward transform `exp(-i xi x)` the
/// multiplier of the kernel `c_n y_j / |y|^{n+1}` is `-i xi_j / |xi|`; it is
/// set to zero at `xi = 0` and on the Nyquist plane of axis `j`, where it is
/// not representable by a real field.
pub fn riesz_spectral<const D: usize>(j: usize, f: &ScalarField<D>, padding: f64) -> Result<ScalarField<D>> {
    check_axis::<D>(j)?;
    if !(padding >= 0.0 && padding.is_finite()) {
        return Err(Error::InvalidArgument(format!("padding {padding} must be >= 0")));
    }
    let spec = f.spec();
    let shape = spec.shape();
    let h = spec.spacing();
    let pshape: [usize; D] = std::array::from_fn(|a| shape[a] + (padding * shape[a] as f64).ceil() as usize);
    let total: usize = pshape.iter().product();
    let pstride: [usize; D] = std::array::from_fn(|a| pshape[a + 1..].iter().product());
    let mut buf = vec![Complex64::new(0.0, 0.0); total];
    for k in 0..spec.len() {
        let idx = spec.multi(k);
        let p: usize = (0..D).map(|a| idx[a] * pstride[a]).sum();
        buf[p] = Complex64::new(f.values()[k], 0.0);
    }
    fft_nd(&mut buf, &pshape, false);
    let freqs: Vec<Vec<f64>> = (0..D).map(|a| frequencies(pshape[a], h[a])).collect();
    for (p, v) in buf.iter_mut().enumerate() {
        let mut xi = [0.0; D];
        let mut nyquist = false;
        for a in 0..D {
            let i = (p / pstride[a]) % pshape[a];
            xi[a] = freqs[a][i];
            if a == j && pshape[a] % 2 == 0 && i == pshape[a] / 2 {
                nyquist = true;
            }
        }
        let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || nyquist {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, -xi[j] / norm);
        }
    }
    fft_nd(&mut buf, &pshape, true);
    let scale = 1.0 / total as f64;
    let data = (0..spec.len())
        .map(|k| {
            let idx = spec.multi(k);
            let p: usize = (0..D).map(|a| idx[a] * pstride[a]).sum();
            buf[p].re * scale
        })
        .collect();
    ScalarField::from_raw(spec.clone(), data)
}

/// Riesz transform by principal-value quadrature on the nodes of `eval`.
pub fn riesz_pv<const D: usize>(
    j: usize,
    f: &ScalarField<D>,
    eval: &Window<D>,
    cfg: &PvConfig,
) -> Result<ScalarField<D>> {
    check_axis::<D>(j)?;
    pv_convolve(&riesz_kernel_fn::<D>(j), f, eval, cfg)
}

fn riesz_kernel_fn<const D: usize>(j: usize) -> impl Fn(&[f64; D]) -> f64 + Sync {
    let c = riesz_constant(D);
    move |y: &[f64; D]| {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        c * y[j] / r
    }
}

/// Riesz transform by principal-value quadrature at a list of nodes.
pub fn riesz_pv_points<const D: usize>(
    j: usize,
    f: &ScalarField<D>,
    points: &[[usize; D]],
    cfg: &PvConfig,
) -> Result<Vec<f64>> {
    check_axis::<D>(j)?;
    pv_convolve_points(&riesz_kernel_fn::<D>(j), f, points, cfg)
}
