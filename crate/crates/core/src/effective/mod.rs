//! The effective one-dimensional side of the reduction: the potential
//! `V(s) = C(S) (tau + alpha')^2(s) + c - k^2(s)/4`, its Fourier
//! coefficients under the `V = sum_n L^{-1/2} nu_n exp(2 pi i n s / L)`
//! convention, the plane-wave Floquet fibers, bands, gaps, and the
//! first-order gap-width asymptotics.

mod bands;
mod floquet;
mod gaps;

pub use bands::{compute_bands, evenness_defect, BandStructure};
pub use floquet::{assemble_floquet, solve_fiber_1d, BoundaryCondition, FloquetMatrix};
pub use gaps::{
    compute_gaps, first_open_gap, gap_slope_fit, locate_gap_by_fourier, FirstGap, GapPrediction,
    GapReport, SlopeFit,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::WaveguideGeometry;
use crate::numerics::fft;

/// Sampled effective potential with its Fourier coefficients.
#[derive(Debug, Clone)]
pub struct EffectivePotential {
    period: f64,
    samples: Vec<f64>,
    /// `nu_n` stored at index `n mod M`.
    coeffs: Vec<Complex64>,
}

/// `nu_n = L^{-1/2} (L/M) sum_j V(s_j) exp(-2 pi i n s_j / L)` — the
/// discrete Fourier coefficients under the paper-side convention, indexed by
/// `n mod M`.
pub fn fourier_coefficients(samples: &[f64], period: f64) -> Result<Vec<Complex64>> {
    let m = samples.len();
    let modes = fft::dft_forward(samples)?;
    let scale = period.sqrt() / m as f64;
    Ok(modes.into_iter().map(|z| z * scale).collect())
}

impl EffectivePotential {
    /// Wraps already-sampled values (power of two, at least 64 samples).
    pub fn from_samples(period: f64, samples: Vec<f64>) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::Potential(format!(
                "period must be positive, got {period}"
            )));
        }
        if samples.len() < 64 || !samples.len().is_power_of_two() {
            return Err(Error::Potential(format!(
                "sample count must be a power of two >= 64, got {}",
                samples.len()
            )));
        }
        let coeffs = fourier_coefficients(&samples, period)?;
        Ok(Self {
            period,
            samples,
            coeffs,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `nu_n` for `|n| <= M/2`; `None` beyond the stored range.
    pub fn nu(&self, n: i64) -> Option<Complex64> {
        let m = self.samples.len() as i64;
        if n.abs() > m / 2 {
            return None;
        }
        Some(self.coeffs[n.rem_euclid(m) as usize])
    }

    /// Largest `|nu_p|` over the top half of the stored range — the tail
    /// magnitude the aliasing guard checks before treating out-of-range
    /// coefficients as zero.
    pub fn tail_magnitude(&self) -> f64 {
        let m = self.samples.len() as i64;
        let mut worst: f64 = 0.0;
        for p in (m / 4)..=(m / 2) {
            worst = worst.max(self.nu(p).unwrap().norm());
        }
        worst
    }

    pub fn min_value(&self) -> f64 {
        self.samples.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// The potential scaled by a constant factor (`mu W` in the gap-width
    /// asymptotics, `gamma^2 V` under geometry scaling).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            period: self.period,
            samples: self.samples.iter().map(|v| v * factor).collect(),
            coeffs: self.coeffs.iter().map(|z| z * factor).collect(),
        }
    }

    /// The potential shifted by a constant (used by shift-covariance checks).
    pub fn shifted(&self, offset: f64) -> Self {
        let samples = self.samples.iter().map(|v| v + offset).collect();
        Self::from_samples(self.period, samples).expect("shift keeps the sample layout")
    }

    /// Max `|nu_n - conj(nu_{-n})|` — zero for real potentials up to FFT
    /// round-off.
    pub fn reality_defect(&self) -> f64 {
        let m = self.samples.len() as i64;
        let mut worst: f64 = 0.0;
        for n in 0..=(m / 2) {
            let a = self.coeffs[n.rem_euclid(m) as usize];
            let b = self.coeffs[(-n).rem_euclid(m) as usize];
            worst = worst.max((a - b.conj()).norm());
        }
        worst
    }

    /// Relative defect of `sum_j V(s_j)^2 (L/M) = sum_n |nu_n|^2`.
    pub fn parseval_defect(&self) -> f64 {
        let m = self.samples.len() as f64;
        let lhs: f64 = self.samples.iter().map(|v| v * v).sum::<f64>() * self.period / m;
        let rhs: f64 = self.coeffs.iter().map(|z| z.norm_sqr()).sum();
        (lhs - rhs).abs() / lhs.abs().max(1e-300)
    }
}

/// Builds `V(s_j) = C_S (tau + alpha')^2(s_j) + c - k(s_j)^2 / 4` on `m`
/// uniform samples. Under the standing assumption `c > ||k^2/4||_inf` and
/// `C_S >= 0` the result is positive; a nonpositive minimum is rejected.
pub fn effective_potential(
    g: &WaveguideGeometry,
    twist_constant: f64,
    m: usize,
) -> Result<EffectivePotential> {
    if twist_constant < 0.0 {
        return Err(Error::Potential(format!(
            "twist constant C(S) must be nonnegative, got {twist_constant}"
        )));
    }
    if m < 64 || !m.is_power_of_two() {
        return Err(Error::Potential(format!(
            "sample count must be a power of two >= 64, got {m}"
        )));
    }
    let l = g.period();
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let s = j as f64 * l / m as f64;
            let tw = g.twist_rate_at(s);
            let k = g.curvature().eval(s);
            twist_constant * tw * tw + g.energy_shift() - k * k / 4.0
        })
        .collect();
    let v = EffectivePotential::from_samples(l, samples)?;
    if v.min_value() <= 0.0 {
        return Err(Error::Potential(format!(
            "effective potential is not positive (min {:.6e}); the geometry violates \
             the standing assumption",
            v.min_value()
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec, PeriodicProfile};
    use std::f64::consts::TAU;

    fn geometry(
        l: f64,
        k: PeriodicProfile,
        tau: PeriodicProfile,
        alpha: PeriodicProfile,
        c: f64,
    ) -> WaveguideGeometry {
        let _ = l;
        build_geometry(GeometrySpec {
            curvature: k,
            torsion: tau,
            twist_angle: alpha,
            epsilon: 0.1,
            energy_shift: c,
            scale: None,
        })
        .unwrap()
    }

    #[test]
    fn constant_potential_has_a_single_mode() {
        let l = 1.0;
        let g = geometry(
            l,
            PeriodicProfile::constant(l, 0.0),
            PeriodicProfile::constant(l, 0.0),
            PeriodicProfile::constant(l, 0.0),
            1.0,
        );
        let v = effective_potential(&g, 0.3, 64).unwrap();
        assert!(v.samples().iter().all(|&x| (x - 1.0).abs() < 1e-14));
        // nu_0 = sqrt(L) * mean = sqrt(1) * 1
        assert!((v.nu(0).unwrap().re - l.sqrt()).abs() < 1e-12);
        for n in 1..=32 {
            assert!(v.nu(n).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn constant_curvature_shifts_by_k_squared_over_four() {
        let l = 1.0;
        let g = geometry(
            l,
            PeriodicProfile::constant(l, 1.0),
            PeriodicProfile::constant(l, 0.0),
            PeriodicProfile::constant(l, 0.0),
            1.0,
        );
        let v = effective_potential(&g, 0.0, 64).unwrap();
        assert!(v.samples().iter().all(|&x| (x - 0.75).abs() < 1e-14));
    }

    /// Direct Riemann quadrature of the Fourier integral, independent of the
    /// FFT path.
    fn nu_oracle(samples: &[f64], l: f64, n: i64) -> Complex64 {
        let m = samples.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &v) in samples.iter().enumerate() {
            let s = j as f64 * l / m as f64;
            let phase = -TAU * n as f64 * s / l;
            acc += Complex64::new(v, 0.0) * Complex64::new(phase.cos(), phase.sin());
        }
        acc * (l / m as f64) / l.sqrt()
    }

    #[test]
    fn twist_squared_potential_matches_the_quadrature_oracle() {
        // C_S = 1, tau + alpha' = cos(s), k = 0, c = 1 on L = 2 pi:
        // V = 1 + cos^2 = 3/2 + cos(2s)/2
        let l = TAU;
        let g = geometry(
            l,
            PeriodicProfile::constant(l, 0.0),
            PeriodicProfile::from_modes(l, &[(1, Complex64::new(0.5, 0.0))]).unwrap(),
            PeriodicProfile::constant(l, 0.0),
            1.0,
        );
        let v = effective_potential(&g, 1.0, 256).unwrap();
        for j in 0..256 {
            let s = j as f64 * l / 256.0;
            let expect = 1.5 + (2.0 * s).cos() / 2.0;
            assert!((v.samples()[j] - expect).abs() < 1e-12);
        }
        // nu_0 = (3/2) sqrt(2 pi), nu_{+-2} = sqrt(2 pi)/4
        assert!((v.nu(0).unwrap().re - 1.5 * l.sqrt()).abs() < 1e-10);
        assert!((v.nu(2).unwrap().re - l.sqrt() / 4.0).abs() < 1e-10);
        assert!((v.nu(-2).unwrap().re - l.sqrt() / 4.0).abs() < 1e-10);
        for n in [0i64, 1, 2, 3, 4, 7] {
            let oracle = nu_oracle(v.samples(), l, n);
            assert!(
                (v.nu(n).unwrap() - oracle).norm() < 1e-10,
                "nu_{n} disagrees with the quadrature oracle"
            );
        }
    }

    #[test]
    fn fourier_examples() {
        // constant 5 on L = 1
        let v = EffectivePotential::from_samples(1.0, vec![5.0; 64]).unwrap();
        assert!((v.nu(0).unwrap().re - 5.0).abs() < 1e-12);
        assert!(v.nu(3).unwrap().norm() < 1e-12);
        // cos(2 pi s / L): nu_{+-1} = sqrt(L)/2
        let l = 3.0;
        let samples: Vec<f64> = (0..128).map(|j| (TAU * j as f64 / 128.0).cos()).collect();
        let v = EffectivePotential::from_samples(l, samples).unwrap();
        assert!((v.nu(1).unwrap().re - l.sqrt() / 2.0).abs() < 1e-12);
        assert!((v.nu(-1).unwrap().re - l.sqrt() / 2.0).abs() < 1e-12);
        assert!(v.nu(2).unwrap().norm() < 1e-12);
    }

    #[test]
    fn reality_and_parseval() {
        let samples: Vec<f64> = (0..256)
            .map(|j| {
                let s = TAU * j as f64 / 256.0;
                1.0 + 0.3 * s.cos() + 0.17 * (3.0 * s).sin() - 0.05 * (7.0 * s).cos()
            })
            .collect();
        let v = EffectivePotential::from_samples(TAU, samples).unwrap();
        assert!(v.reality_defect() <= 1e-12);
        assert!(v.parseval_defect() <= 1e-8);
    }

    #[test]
    fn rejects_bad_sample_counts() {
        assert!(EffectivePotential::from_samples(1.0, vec![1.0; 48]).is_err());
        assert!(EffectivePotential::from_samples(1.0, vec![1.0; 96]).is_err());
    }
}
