use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// An `L`-periodic real profile, given either as uniform samples on `[0, L)`
/// or as a finite list of complex Fourier modes.
///
/// Evaluation wraps exactly: `f(s + L) = f(s)` for any `s`. Sampled profiles
/// interpolate linearly between grid points and differentiate by centered
/// differences on the grid (both O(h^2)); mode profiles evaluate and
/// differentiate analytically.
#[derive(Debug, Clone)]
pub struct PeriodicProfile {
    period: f64,
    data: ProfileData,
}

#[derive(Debug, Clone)]
enum ProfileData {
    Samples { values: Vec<f64>, derivs: Vec<f64> },
    /// Modes for m >= 0 under `f(s) = sum_m c_m exp(2 pi i m s / L)` with
    /// `c_{-m} = conj(c_m)` implied by realness.
    Modes { modes: Vec<(u32, Complex64)> },
}

impl PeriodicProfile {
    pub fn from_samples(period: f64, values: Vec<f64>) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::Geometry(format!(
                "profile period must be positive, got {period}"
            )));
        }
        let n = values.len();
        if n < 8 {
            return Err(Error::Geometry(format!(
                "profile needs at least 8 samples, got {n}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Geometry("profile samples must be finite".into()));
        }
        let h = period / n as f64;
        let derivs = (0..n)
            .map(|j| (values[(j + 1) % n] - values[(j + n - 1) % n]) / (2.0 * h))
            .collect();
        Ok(Self {
            period,
            data: ProfileData::Samples { values, derivs },
        })
    }

    /// Builds from Fourier modes `(m, c_m)` with `m >= 0`; the negative modes
    /// are the complex conjugates. The zero mode must be real.
    pub fn from_modes(period: f64, modes: &[(i64, Complex64)]) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::Geometry(format!(
                "profile period must be positive, got {period}"
            )));
        }
        let mut by_index: Vec<(u32, Complex64)> = Vec::new();
        for &(m, c) in modes {
            if m < 0 {
                return Err(Error::Geometry(
                    "supply Fourier modes for m >= 0 only; negative modes are implied by realness"
                        .into(),
                ));
            }
            if m == 0 && c.im.abs() > 1e-14 * c.norm().max(1.0) {
                return Err(Error::Geometry(format!(
                    "zero mode of a real profile must be real, got imaginary part {:.3e}",
                    c.im
                )));
            }
            if by_index.iter().any(|&(mm, _)| mm == m as u32) {
                return Err(Error::Geometry(format!("duplicate Fourier mode m = {m}")));
            }
            by_index.push((m as u32, c));
        }
        by_index.sort_unstable_by_key(|&(m, _)| m);
        Ok(Self {
            period,
            data: ProfileData::Modes { modes: by_index },
        })
    }

    pub fn constant(period: f64, value: f64) -> Self {
        Self::from_modes(period, &[(0, Complex64::new(value, 0.0))])
            .expect("constant profile is always valid")
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Internal grid size for sample storage, or a recommended resampling
    /// grid for mode storage (enough to resolve the highest mode).
    pub fn sample_count(&self) -> usize {
        match &self.data {
            ProfileData::Samples { values, .. } => values.len(),
            ProfileData::Modes { modes } => {
                let max_m = modes.last().map(|&(m, _)| m as usize).unwrap_or(0);
                (4 * max_m.max(1)).next_power_of_two().max(64)
            }
        }
    }

    fn wrap(&self, s: f64) -> f64 {
        let t = s - self.period * (s / self.period).floor();
        if t >= self.period {
            0.0
        } else {
            t
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let t = self.wrap(s);
        match &self.data {
            ProfileData::Samples { values, .. } => interp(values, t, self.period),
            ProfileData::Modes { modes } => {
                let mut acc = 0.0;
                for &(m, c) in modes {
                    if m == 0 {
                        acc += c.re;
                    } else {
                        let phase = TAU * m as f64 * t / self.period;
                        acc += 2.0 * (c * Complex64::new(phase.cos(), phase.sin())).re;
                    }
                }
                acc
            }
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        let t = self.wrap(s);
        match &self.data {
            ProfileData::Samples { derivs, .. } => interp(derivs, t, self.period),
            ProfileData::Modes { modes } => {
                let mut acc = 0.0;
                for &(m, c) in modes {
                    if m > 0 {
                        let omega = TAU * m as f64 / self.period;
                        let phase = omega * t;
                        let rot = Complex64::new(0.0, omega);
                        acc += 2.0 * (c * rot * Complex64::new(phase.cos(), phase.sin())).re;
                    }
                }
                acc
            }
        }
    }

    /// Max |f| — exact over the grid for sampled profiles, probed on a dense
    /// grid (4x the recommended resolution) for mode profiles.
    pub fn max_abs(&self) -> f64 {
        match &self.data {
            ProfileData::Samples { values, .. } => {
                values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
            }
            ProfileData::Modes { .. } => {
                let n = 4 * self.sample_count();
                (0..n)
                    .map(|j| self.eval(j as f64 * self.period / n as f64).abs())
                    .fold(0.0, f64::max)
            }
        }
    }

    /// The profile multiplied by a constant.
    pub fn scaled(&self, factor: f64) -> Self {
        let data = match &self.data {
            ProfileData::Samples { values, derivs } => ProfileData::Samples {
                values: values.iter().map(|v| v * factor).collect(),
                derivs: derivs.iter().map(|v| v * factor).collect(),
            },
            ProfileData::Modes { modes } => ProfileData::Modes {
                modes: modes.iter().map(|&(m, c)| (m, c * factor)).collect(),
            },
        };
        Self {
            period: self.period,
            data,
        }
    }

    /// Uniform samples on `[0, L)`.
    pub fn resample(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| self.eval(j as f64 * self.period / n as f64))
            .collect()
    }
}

fn interp(values: &[f64], t: f64, period: f64) -> f64 {
    let n = values.len();
    let x = t / period * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let frac = x - i as f64;
    values[i] * (1.0 - frac) + values[(i + 1) % n] * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_wraps_periodically() {
        let p = PeriodicProfile::from_samples(2.0, (0..16).map(|j| (j as f64).sin()).collect())
            .unwrap();
        for s in [0.0, 0.3, 1.7, 1.999] {
            // up to rounding in the argument reduction
            assert!((p.eval(s) - p.eval(s + 2.0)).abs() < 1e-13);
            assert!((p.eval(s) - p.eval(s - 4.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn mode_profile_is_real_and_consistent() {
        let l = 3.0;
        let p = PeriodicProfile::from_modes(
            l,
            &[
                (0, Complex64::new(1.5, 0.0)),
                (2, Complex64::new(0.25, -0.1)),
            ],
        )
        .unwrap();
        // f(s) = 1.5 + 0.5 cos(4 pi s / L) + 0.2 sin(4 pi s / L)
        let f = |s: f64| 1.5 + 0.5 * (2.0 * TAU * s / l).cos() + 0.2 * (2.0 * TAU * s / l).sin();
        for j in 0..40 {
            let s = j as f64 * 0.1;
            assert!((p.eval(s) - f(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_consistent_with_finite_differences() {
        // |(f(s+h) - f(s-h)) / 2h - f'(s)| = O(h^2) on a smooth profile
        let l = TAU;
        let n = 256;
        let values: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).sin()).collect();
        let p = PeriodicProfile::from_samples(l, values).unwrap();
        let worst = |h: f64| -> f64 {
            (0..37)
                .map(|j| {
                    let s = j as f64 * l / 37.0;
                    let fd = (p.eval(s + h) - p.eval(s - h)) / (2.0 * h);
                    (fd - p.deriv(s)).abs()
                })
                .fold(0.0f64, f64::max)
        };
        // probe step tied to the sample grid spacing
        let h0 = l / n as f64;
        let e1 = worst(4.0 * h0);
        let e2 = worst(8.0 * h0);
        assert!(e1 < 4e-3, "coarse-step FD error {e1}");
        assert!(e2 > e1, "error should grow with the probe step");
    }

    #[test]
    fn rejects_too_few_samples() {
        assert!(PeriodicProfile::from_samples(1.0, vec![0.0; 7]).is_err());
    }

    #[test]
    fn rejects_negative_mode_indices() {
        assert!(
            PeriodicProfile::from_modes(1.0, &[(-1, Complex64::new(1.0, 0.0))]).is_err()
        );
    }
}
