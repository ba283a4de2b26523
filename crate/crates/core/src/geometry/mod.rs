//! Periodic tube geometry: curvature, torsion and twist profiles, the
//! standing assumption `c > ||k^2/4||_inf`, the thickness guard on
//! `beta_eps = 1 - eps k <z_alpha, y>`, and the gamma-scaling
//! `k -> gamma k`, `(tau + alpha') -> gamma (tau + alpha')`, `c -> gamma^2 c`.

mod frenet;
mod profile;

pub use frenet::frenet_from_curve;
pub use profile::PeriodicProfile;

use crate::error::{Error, Result};

/// Margin by which `beta_eps` must stay above zero; `validate_thickness`
/// accepts a geometry only if `eps * max|k| * radius < 1 - BETA_MARGIN`,
/// which keeps the discretized `1/beta` coefficients bounded.
pub const BETA_MARGIN: f64 = 0.05;

/// The combined twist rate `(tau + alpha')(s)` as a profile.
#[derive(Debug, Clone)]
pub struct TwistRate(PeriodicProfile);

impl TwistRate {
    pub fn profile(&self) -> &PeriodicProfile {
        &self.0
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.0.eval(s)
    }
}

/// Full description of the periodic tube: the three `L`-periodic profiles,
/// the thickness `eps`, the energy shift `c`, and the cumulative scale.
#[derive(Debug, Clone)]
pub struct WaveguideGeometry {
    curvature: PeriodicProfile,
    torsion: PeriodicProfile,
    twist_angle: PeriodicProfile,
    epsilon: f64,
    energy_shift: f64,
    scale: f64,
}

/// Inputs to [`build_geometry`].
#[derive(Debug, Clone)]
pub struct GeometrySpec {
    pub curvature: PeriodicProfile,
    pub torsion: PeriodicProfile,
    pub twist_angle: PeriodicProfile,
    pub epsilon: f64,
    pub energy_shift: f64,
    pub scale: Option<f64>,
}

/// Validates and assembles a [`WaveguideGeometry`].
///
/// Rejects mismatched periods, `eps <= 0`, a twist angle with
/// `alpha(0) != 0`, and any `c <= max_s k(s)^2 / 4`.
pub fn build_geometry(spec: GeometrySpec) -> Result<WaveguideGeometry> {
    let period = spec.curvature.period();
    for (name, p) in [("torsion", &spec.torsion), ("twist", &spec.twist_angle)] {
        if (p.period() - period).abs() > 1e-12 * period.abs().max(1.0) {
            return Err(Error::Geometry(format!(
                "{name} period {} does not match curvature period {period}",
                p.period()
            )));
        }
    }
    if !(spec.epsilon > 0.0) {
        return Err(Error::Geometry(format!(
            "thickness eps must be positive, got {}",
            spec.epsilon
        )));
    }
    let gamma = spec.scale.unwrap_or(1.0);
    if !(gamma > 0.0) {
        return Err(Error::Geometry(format!(
            "scale gamma must be positive, got {gamma}"
        )));
    }
    let alpha0 = spec.twist_angle.eval(0.0);
    if alpha0.abs() > 1e-10 {
        return Err(Error::Geometry(format!(
            "twist angle must vanish at s = 0, got alpha(0) = {alpha0:.3e}"
        )));
    }
    let k_max = spec.curvature.max_abs();
    if spec.energy_shift <= k_max * k_max / 4.0 {
        return Err(Error::Geometry(format!(
            "energy shift c = {} violates c > max k^2/4 = {}",
            spec.energy_shift,
            k_max * k_max / 4.0
        )));
    }
    Ok(WaveguideGeometry {
        curvature: spec.curvature,
        torsion: spec.torsion,
        twist_angle: spec.twist_angle,
        epsilon: spec.epsilon,
        energy_shift: spec.energy_shift,
        scale: gamma,
    })
}

impl WaveguideGeometry {
    pub fn period(&self) -> f64 {
        self.curvature.period()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The spectral shift `c` of the standing assumption `c > ||k^2/4||_inf`.
    pub fn energy_shift(&self) -> f64 {
        self.energy_shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn curvature(&self) -> &PeriodicProfile {
        &self.curvature
    }

    pub fn torsion(&self) -> &PeriodicProfile {
        &self.torsion
    }

    pub fn twist_angle(&self) -> &PeriodicProfile {
        &self.twist_angle
    }

    /// `(tau + alpha')(s)` sampled as a profile on a power-of-two grid.
    pub fn twist_rate(&self) -> TwistRate {
        let n = self
            .torsion
            .sample_count()
            .max(self.twist_angle.sample_count())
            .max(64)
            .next_power_of_two();
        let l = self.period();
        let values: Vec<f64> = (0..n)
            .map(|j| {
                let s = j as f64 * l / n as f64;
                self.twist_rate_at(s)
            })
            .collect();
        TwistRate(PeriodicProfile::from_samples(l, values).expect("twist-rate resample"))
    }

    /// Pointwise `(tau + alpha')(s)`.
    pub fn twist_rate_at(&self, s: f64) -> f64 {
        self.torsion.eval(s) + self.twist_angle.deriv(s)
    }

    /// `beta_eps(s, y) = 1 - eps k(s) (cos(alpha) y1 - sin(alpha) y2)`.
    pub fn beta(&self, s: f64, y: [f64; 2]) -> f64 {
        let k = self.curvature.eval(s);
        let alpha = self.twist_angle.eval(s);
        1.0 - self.epsilon * k * (alpha.cos() * y[0] - alpha.sin() * y[1])
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Geometry(format!(
                "thickness eps must be positive, got {epsilon}"
            )));
        }
        let mut g = self.clone();
        g.epsilon = epsilon;
        Ok(g)
    }
}

/// True iff the tube wall stays clear of the self-touching regime:
/// `eps * max|k| * section_radius < 1 - BETA_MARGIN`, which bounds
/// `beta_eps >= BETA_MARGIN` over the whole tube.
pub fn validate_thickness(g: &WaveguideGeometry, section_radius: f64) -> bool {
    g.epsilon() * g.curvature.max_abs() * section_radius < 1.0 - BETA_MARGIN
}

/// Applies the scaling `k -> gamma k`, `(tau + alpha') -> gamma (tau + alpha')`,
/// `c -> gamma^2 c`.
///
/// The twist angle itself is left untouched (it enters only through
/// `z_alpha` inside `beta_eps`); the torsion absorbs the rate change as
/// `tau_gamma = gamma tau + (gamma - 1) alpha'`, which keeps
/// `tau_gamma + alpha' = gamma (tau + alpha')` exactly.
pub fn scale_geometry(g: &WaveguideGeometry, gamma: f64) -> Result<WaveguideGeometry> {
    if !(gamma > 0.0) {
        return Err(Error::Geometry(format!(
            "scale gamma must be positive, got {gamma}"
        )));
    }
    let l = g.period();
    let n = g
        .torsion
        .sample_count()
        .max(g.twist_angle.sample_count())
        .max(64)
        .next_power_of_two();
    let torsion_values: Vec<f64> = (0..n)
        .map(|j| {
            let s = j as f64 * l / n as f64;
            gamma * g.torsion.eval(s) + (gamma - 1.0) * g.twist_angle.deriv(s)
        })
        .collect();
    Ok(WaveguideGeometry {
        curvature: g.curvature.scaled(gamma),
        torsion: PeriodicProfile::from_samples(l, torsion_values)?,
        twist_angle: g.twist_angle.clone(),
        epsilon: g.epsilon,
        energy_shift: gamma * gamma * g.energy_shift,
        scale: g.scale * gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(period: f64, value: f64) -> PeriodicProfile {
        PeriodicProfile::from_samples(period, vec![value; 8]).unwrap()
    }

    fn straight(epsilon: f64, c: f64) -> WaveguideGeometry {
        build_geometry(GeometrySpec {
            curvature: constant(1.0, 0.0),
            torsion: constant(1.0, 0.0),
            twist_angle: constant(1.0, 0.0),
            epsilon,
            energy_shift: c,
            scale: None,
        })
        .unwrap()
    }

    #[test]
    fn straight_untwisted_tube_is_valid() {
        let g = straight(0.1, 1.0);
        assert_eq!(g.period(), 1.0);
        assert_eq!(g.beta(0.3, [0.5, -0.2]), 1.0);
    }

    #[test]
    fn rejects_c_at_the_assumption_boundary() {
        let err = build_geometry(GeometrySpec {
            curvature: constant(1.0, 2.0),
            torsion: constant(1.0, 0.0),
            twist_angle: constant(1.0, 0.0),
            epsilon: 0.1,
            energy_shift: 0.9,
            scale: None,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn accepts_c_above_max_curvature_term() {
        // k(s) = 0.5 + 0.1 cos(2 pi s), max k^2/4 evaluated on the grid
        let n = 64;
        let values: Vec<f64> = (0..n)
            .map(|j| 0.5 + 0.1 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let g = build_geometry(GeometrySpec {
            curvature: PeriodicProfile::from_samples(1.0, values).unwrap(),
            torsion: constant(1.0, 0.0),
            twist_angle: constant(1.0, 0.0),
            epsilon: 0.1,
            energy_shift: 1.0,
            scale: None,
        });
        assert!(g.is_ok());
        // max k^2/4 = 0.36/4 = 0.09 < 1
    }

    #[test]
    fn rejects_mismatched_periods() {
        let err = build_geometry(GeometrySpec {
            curvature: constant(1.0, 0.0),
            torsion: constant(2.0, 0.0),
            twist_angle: constant(1.0, 0.0),
            epsilon: 0.1,
            energy_shift: 1.0,
            scale: None,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn rejects_nonzero_alpha_at_origin() {
        let err = build_geometry(GeometrySpec {
            curvature: constant(1.0, 0.0),
            torsion: constant(1.0, 0.0),
            twist_angle: constant(1.0, 0.7),
            epsilon: 0.1,
            energy_shift: 1.0,
            scale: None,
        })
        .unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn thickness_guard_examples() {
        let mk = |k: f64, eps: f64| {
            build_geometry(GeometrySpec {
                curvature: constant(1.0, k),
                torsion: constant(1.0, 0.0),
                twist_angle: constant(1.0, 0.0),
                epsilon: eps,
                energy_shift: k * k / 4.0 + 1.0,
                scale: None,
            })
            .unwrap()
        };
        assert!(validate_thickness(&mk(1.0, 0.1), 1.0)); // 0.1 < 0.95
        assert!(!validate_thickness(&mk(1.0, 1.2), 1.0)); // beta would vanish
        assert!(!validate_thickness(&mk(1.9, 0.5), 1.0)); // 0.95 is not < 0.95
    }

    #[test]
    fn identity_scale_changes_nothing() {
        let g = straight(0.1, 2.0);
        let gs = scale_geometry(&g, 1.0).unwrap();
        assert_eq!(gs.energy_shift(), 2.0);
        assert_eq!(gs.scale(), 1.0);
        assert_eq!(gs.twist_rate_at(0.37), 0.0);
    }

    #[test]
    fn scale_composition_matches_product() {
        let n = 64;
        let l = 2.0;
        let curv: Vec<f64> = (0..n)
            .map(|j| 0.3 + 0.1 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).sin())
            .collect();
        let tors: Vec<f64> = (0..n)
            .map(|j| 0.2 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let alpha: Vec<f64> = (0..n)
            .map(|j| 0.4 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).sin())
            .collect();
        let g = build_geometry(GeometrySpec {
            curvature: PeriodicProfile::from_samples(l, curv).unwrap(),
            torsion: PeriodicProfile::from_samples(l, tors).unwrap(),
            twist_angle: PeriodicProfile::from_samples(l, alpha).unwrap(),
            epsilon: 0.1,
            energy_shift: 1.0,
            scale: None,
        })
        .unwrap();
        let a = scale_geometry(&scale_geometry(&g, 0.7).unwrap(), 0.4).unwrap();
        let b = scale_geometry(&g, 0.28).unwrap();
        assert!((a.energy_shift() - b.energy_shift()).abs() < 1e-12);
        assert!((a.scale() - b.scale()).abs() < 1e-12);
        for j in 0..97 {
            let s = j as f64 * l / 97.0;
            assert!((a.curvature().eval(s) - b.curvature().eval(s)).abs() < 1e-12);
            assert!((a.twist_rate_at(s) - b.twist_rate_at(s)).abs() < 1e-12);
            assert!((a.beta(s, [0.3, -0.4]) - b.beta(s, [0.3, -0.4])).abs() < 1e-12);
        }
    }
}
