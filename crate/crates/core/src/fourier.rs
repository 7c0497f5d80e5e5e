//! Circle quadrature helpers: uniform grids (with a half-step offset so the
//! grid never hits declared singular boundary points) and FFT-based Fourier
//! coefficients of scalar- and matrix-valued samples.

use crate::matrix::{C64, ComplexMatrix};
use rustfft::{num_complex::Complex64 as FftC64, FftPlanner};

/// Angles `theta_j = 2 pi (j + 1/2) / m`.
pub fn offset_angles(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64)
        .collect()
}

/// Points `rho e^{i theta_j}` on the offset grid.
pub fn offset_circle(rho: f64, m: usize) -> Vec<C64> {
    offset_angles(m)
        .into_iter()
        .map(|t| C64::from_polar(rho, t))
        .collect()
}

/// Forward DFT of the samples: `out[k] = sum_j x[j] e^{-2 pi i j k / m}`.
fn dft(samples: &[C64]) -> Vec<C64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(samples.len());
    let mut buf: Vec<FftC64> = samples.iter().map(|z| FftC64::new(z.re, z.im)).collect();
    fft.process(&mut buf);
    buf.into_iter().map(|z| C64::new(z.re, z.im)).collect()
}

/// Fourier coefficients `c_k = (1/m) sum_j f(rho e^{i theta_j}) e^{-i k theta_j} / rho^k`
/// on the offset grid, for `k` in `k_lo..=k_hi`.
///
/// For samples of an analytic (resp. bounded boundary) function this is the
/// Taylor (resp. Laurent) coefficient up to aliasing.
pub fn scalar_coeffs(samples: &[C64], rho: f64, k_lo: i64, k_hi: i64) -> Vec<C64> {
    let m = samples.len();
    let spec = dft(samples);
    (k_lo..=k_hi)
        .map(|k| {
            let idx = k.rem_euclid(m as i64) as usize;
            // offset grid phase: e^{-i k pi / m} with the signed k
            let phase = C64::from_polar(1.0, -(k as f64) * std::f64::consts::PI / m as f64);
            spec[idx] * phase / (m as f64) / rho.powi(k as i32)
        })
        .collect()
}

/// Matrix-valued version of [`scalar_coeffs`]: one DFT per entry.
pub fn matrix_coeffs(
    samples: &[ComplexMatrix],
    rho: f64,
    k_lo: i64,
    k_hi: i64,
) -> Vec<ComplexMatrix> {
    let m = samples.len();
    assert!(m > 0);
    let rows = samples[0].rows();
    let cols = samples[0].cols();
    let count = (k_hi - k_lo + 1) as usize;
    let mut out = vec![ComplexMatrix::zeros(rows, cols); count];
    let mut entry = vec![C64::new(0.0, 0.0); m];
    for i in 0..rows {
        for j in 0..cols {
            for (s, sample) in samples.iter().enumerate() {
                entry[s] = sample[(i, j)];
            }
            let coeffs = scalar_coeffs(&entry, rho, k_lo, k_hi);
            for (k, c) in coeffs.into_iter().enumerate() {
                out[k][(i, j)] = c;
            }
        }
    }
    out
}
