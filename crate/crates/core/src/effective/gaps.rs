use std::f64::consts::PI;

use super::{assemble_floquet, solve_fiber_1d, BoundaryCondition, EffectivePotential};
use crate::error::{Error, Result};
use crate::geometry::{scale_geometry, WaveguideGeometry};

/// Band touchings split by less than this are reported as closed gaps
/// (degenerate doublets at solver noise level).
pub const GAP_NOISE_FLOOR: f64 = 1e-9;

/// Bands, gaps and widths from the periodic / antiperiodic endpoint solves.
///
/// With the periodic eigenvalues `p_n` (theta = 0) and antiperiodic `a_n`
/// (theta = pi/L), band `n` is `[p_n, a_n]` for odd `n` and `[a_n, p_n]`
/// for even `n`; gap `n` opens between `a_n` and `a_{n+1}` (odd `n`) or
/// `p_n` and `p_{n+1}` (even `n`).
#[derive(Debug, Clone)]
pub struct GapReport {
    period: f64,
    n_max: usize,
    periodic: Vec<f64>,
    antiperiodic: Vec<f64>,
    bands: Vec<(f64, f64)>,
    gaps: Vec<Option<(f64, f64)>>,
    widths: Vec<f64>,
}

pub fn compute_gaps(
    v: &EffectivePotential,
    n_max: usize,
    half_width: usize,
) -> Result<GapReport> {
    let l = v.period();
    let pm = assemble_floquet(v, 0.0, half_width, BoundaryCondition::Periodic)?;
    let am = assemble_floquet(v, 0.0, half_width, BoundaryCondition::Antiperiodic)?;
    let periodic = solve_fiber_1d(&pm, n_max + 2)?;
    let antiperiodic = solve_fiber_1d(&am, n_max + 2)?;

    let endpoint = |n: usize, anti: bool| -> f64 {
        if anti {
            antiperiodic[n - 1]
        } else {
            periodic[n - 1]
        }
    };
    let mut bands = Vec::with_capacity(n_max);
    let mut gaps = Vec::with_capacity(n_max);
    let mut widths = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let odd = n % 2 == 1;
        let band = if odd {
            (endpoint(n, false), endpoint(n, true))
        } else {
            (endpoint(n, true), endpoint(n, false))
        };
        bands.push(band);
        // gap above band n sits between consecutive eigenvalues of the SAME
        // endpoint operator: antiperiodic for odd n, periodic for even n
        let (lo, hi) = if odd {
            (endpoint(n, true), endpoint(n + 1, true))
        } else {
            (endpoint(n, false), endpoint(n + 1, false))
        };
        let width = (hi - lo).max(0.0);
        if width > GAP_NOISE_FLOOR {
            gaps.push(Some((lo, hi)));
            widths.push(width);
        } else {
            gaps.push(None);
            widths.push(0.0);
        }
    }
    Ok(GapReport {
        period: l,
        n_max,
        periodic,
        antiperiodic,
        bands,
        gaps,
        widths,
    })
}

impl GapReport {
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Eigenvalues of the periodic endpoint operator (theta = 0).
    pub fn periodic_eigenvalues(&self) -> &[f64] {
        &self.periodic
    }

    /// Eigenvalues of the antiperiodic endpoint operator (theta = pi/L).
    pub fn antiperiodic_eigenvalues(&self) -> &[f64] {
        &self.antiperiodic
    }

    pub fn band(&self, n: usize) -> (f64, f64) {
        self.bands[n - 1]
    }

    pub fn gap(&self, n: usize) -> Option<(f64, f64)> {
        self.gaps[n - 1]
    }

    /// Gap width `delta_n` (0 when closed).
    pub fn width(&self, n: usize) -> f64 {
        self.widths[n - 1]
    }

    /// Worst violation of the interlacing chain
    /// `p_1 < a_1 <= a_2 < p_2 <= p_3 < a_3 <= ...`.
    pub fn interlacing_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut check = |lo: f64, hi: f64| {
            if hi < lo {
                worst = worst.max(lo - hi);
            }
        };
        let count = self.periodic.len().min(self.antiperiodic.len());
        for n in 1..count {
            if n % 2 == 1 {
                check(self.periodic[n - 1], self.antiperiodic[n - 1]);
                check(self.antiperiodic[n - 1], self.antiperiodic[n]);
                check(self.antiperiodic[n], self.periodic[n]);
            } else {
                check(self.periodic[n - 1], self.periodic[n]);
            }
        }
        worst
    }

    /// Max open-gap width over `n <= n_max`.
    pub fn max_width(&self) -> f64 {
        self.widths.iter().cloned().fold(0.0, f64::max)
    }
}

/// The lowest open gap, if any.
#[derive(Debug, Clone, Copy)]
pub struct FirstGap {
    pub index: usize,
    pub interval: (f64, f64),
    pub width: f64,
}

/// Smallest `n <= n_max` with `delta_n > tol`; `None` suggests a constant
/// potential (every periodic and antiperiodic doublet degenerate).
pub fn first_open_gap(
    v: &EffectivePotential,
    tol: f64,
    n_max: usize,
    half_width: usize,
) -> Result<Option<FirstGap>> {
    let report = compute_gaps(v, n_max, half_width)?;
    for n in 1..=n_max {
        if report.width(n) > tol {
            return Ok(Some(FirstGap {
                index: n,
                interval: report.gap(n).unwrap(),
                width: report.width(n),
            }));
        }
    }
    Ok(None)
}

/// Measured and predicted first-order growth of `delta_n(mu)` for the
/// family `mu W`.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub gap_index: usize,
    /// `(mu, delta_n(mu))` pairs, in the order given.
    pub deltas: Vec<(f64, f64)>,
    /// Least-squares slope through the origin.
    pub fitted: f64,
    /// `(2/sqrt(L)) |omega_n|`.
    pub predicted: f64,
    /// `|fitted - predicted| / predicted`, absent when `omega_n = 0`
    /// (second-order gap; judge by the raw deltas instead).
    pub relative_deviation: Option<f64>,
}

/// Fits `delta_n(mu) ~ slope * mu` over the given couplings and compares
/// against the first-order coefficient `(2/sqrt(L)) |omega_n|`.
pub fn gap_slope_fit(
    w: &EffectivePotential,
    gap_index: usize,
    mu_list: &[f64],
    half_width: usize,
) -> Result<SlopeFit> {
    if mu_list.len() < 3 {
        return Err(Error::Config(format!(
            "slope fit needs at least 3 coupling values, got {}",
            mu_list.len()
        )));
    }
    if mu_list.iter().any(|&mu| !(0.0 < mu && mu <= 0.1)) {
        return Err(Error::Config(
            "coupling values must lie in (0, 0.1] for the asymptotic regime".into(),
        ));
    }
    let (lo, hi) = mu_list
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &mu| {
            (lo.min(mu), hi.max(mu))
        });
    if hi / lo < 5.0 {
        return Err(Error::Config(format!(
            "coupling values should span at least half a decade, got ratio {:.2}",
            hi / lo
        )));
    }
    let mut deltas = Vec::with_capacity(mu_list.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for &mu in mu_list {
        let report = compute_gaps(&w.scaled(mu), gap_index + 1, half_width)?;
        let delta = report.width(gap_index);
        deltas.push((mu, delta));
        num += mu * delta;
        den += mu * mu;
    }
    let fitted = num / den;
    let omega = w
        .nu(gap_index as i64)
        .ok_or_else(|| Error::Config(format!("omega_{gap_index} beyond the stored range")))?;
    let predicted = 2.0 / w.period().sqrt() * omega.norm();
    let relative_deviation = if predicted > 1e-13 {
        Some((fitted - predicted).abs() / predicted)
    } else {
        None
    };
    Ok(SlopeFit {
        gap_index,
        deltas,
        fitted,
        predicted,
        relative_deviation,
    })
}

/// Prediction of Theorem-style gap location under geometry scaling.
#[derive(Debug, Clone)]
pub struct GapPrediction {
    pub gap_index: usize,
    pub gamma: f64,
    /// `(2/sqrt(L)) gamma^2 |nu_n|` from the unscaled potential.
    pub predicted_width: f64,
    /// `|G_n(gamma)|` measured on the scaled potential.
    pub measured_width: f64,
    pub relative_deviation: f64,
    /// Gap interval of the scaled effective operator; the 3D spectrum sees
    /// it offset by `lambda_0/eps^2`.
    pub interval: Option<(f64, f64)>,
}

/// Scales the geometry by `gamma` (so the effective potential becomes
/// `gamma^2 V`), measures `|G_n|`, and compares with the first-order
/// prediction from the `n`-th Fourier coefficient of the unscaled `V`.
pub fn locate_gap_by_fourier(
    g: &WaveguideGeometry,
    twist_constant: f64,
    gap_index: usize,
    gamma: f64,
    sample_count: usize,
    half_width: usize,
) -> Result<GapPrediction> {
    if !(0.0 < gamma && gamma <= 1.0) {
        return Err(Error::Config(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    let v = super::effective_potential(g, twist_constant, sample_count)?;
    let nu = v
        .nu(gap_index as i64)
        .ok_or_else(|| Error::Config(format!("nu_{gap_index} beyond the stored range")))?;
    if nu.norm() < 1e-10 {
        return Err(Error::Potential(format!(
            "nu_{gap_index} = {:.3e} vanishes; pick an index with a nonzero coefficient",
            nu.norm()
        )));
    }
    let scaled = scale_geometry(g, gamma)?;
    let v_scaled = super::effective_potential(&scaled, twist_constant, sample_count)?;
    let report = compute_gaps(&v_scaled, gap_index + 1, half_width)?;
    let measured = report.width(gap_index);
    let predicted = 2.0 / g.period().sqrt() * gamma * gamma * nu.norm();
    Ok(GapPrediction {
        gap_index,
        gamma,
        predicted_width: predicted,
        measured_width: measured,
        relative_deviation: (measured - predicted).abs() / predicted,
        interval: report.gap(gap_index),
    })
}

/// Quasimomentum grid endpoint `pi/L` for convenience.
pub fn zone_edge(period: f64) -> f64 {
    PI / period
}
