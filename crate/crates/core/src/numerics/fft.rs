//! Thin wrapper around rustfft with the sign and normalization conventions
//! used throughout the crate.
//!
//! The forward transform is the plain unnormalized DFT
//!
//! ```text
//! X_k = sum_j x_j exp(-2 pi i j k / n),
//! ```
//!
//! so the Fourier coefficients of a real periodic function under the
//! `V(s) = sum_n L^{-1/2} nu_n exp(2 pi i n s / L)` convention are obtained by
//! scaling with `sqrt(L)/n` (see `effective::fourier_coefficients`). The
//! inverse transform includes the `1/n` factor, making the round trip exact.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub fn require_power_of_two(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "sample count must be a power of two, got {n}"
        )));
    }
    Ok(())
}

/// Unnormalized forward DFT of real samples.
pub fn dft_forward(samples: &[f64]) -> Result<Vec<Complex64>> {
    require_power_of_two(samples.len())?;
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    Ok(buf)
}

/// Inverse DFT with the 1/n normalization.
pub fn dft_inverse(modes: &[Complex64]) -> Result<Vec<Complex64>> {
    require_power_of_two(modes.len())?;
    let n = modes.len();
    let mut buf = modes.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    Ok(buf)
}
