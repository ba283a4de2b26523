//! Recovery of curvature and torsion from samples of an arc-length curve.
//!
//! The curve is `L`-periodic up to a translation, `r(s + L) = u + r(s)`, so
//! the difference stencils wrap through `u`. Curvature comes from
//! `k = |r''|` and torsion from `tau = <r' x r'', r'''> / k^2`, both with
//! centered differences (O(h^2) on smooth curves).

use crate::error::{Error, Result};
use crate::geometry::PeriodicProfile;

type Vec3 = [f64; 3];

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: Vec3, t: f64) -> Vec3 {
    [a[0] * t, a[1] * t, a[2] * t]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Curvature and torsion profiles from uniform samples `r(i L / N)` of an
/// arc-length-parametrized periodic curve.
///
/// `translation` is the period offset `u` in `r(s + L) = u + r(s)`
/// (zero for closed curves). Rejects curves that are not unit-speed to
/// `1e-6` (plus a curvature-dependent allowance for the truncation error of
/// the discrete speed estimate itself) and grid points where the curvature
/// drops below `1e-8` (the Frenet frame is undefined there; supply `k`,
/// `tau` directly instead).
pub fn frenet_from_curve(
    points: &[Vec3],
    period: f64,
    translation: Vec3,
) -> Result<(PeriodicProfile, PeriodicProfile)> {
    let n = points.len();
    if n < 8 {
        return Err(Error::Geometry(format!(
            "curve needs at least 8 samples, got {n}"
        )));
    }
    if !(period > 0.0) {
        return Err(Error::Geometry(format!(
            "curve period must be positive, got {period}"
        )));
    }
    let h = period / n as f64;
    let at = |i: i64| -> Vec3 {
        let wraps = (i as f64 / n as f64).floor();
        let j = i.rem_euclid(n as i64) as usize;
        add(points[j], scale(translation, wraps))
    };

    let mut curvature = Vec::with_capacity(n);
    let mut torsion = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let (m2, m1, p1, p2) = (at(i - 2), at(i - 1), at(i + 1), at(i + 2));
        let d2 = scale(add(add(p1, m1), scale(at(i), -2.0)), 1.0 / (h * h));
        let k = norm(d2);
        // fourth-order first derivative; the unit-speed tolerance carries a
        // curvature-dependent allowance for its own truncation error
        let d1 = scale(
            add(
                add(scale(p2, -1.0), scale(p1, 8.0)),
                add(scale(m1, -8.0), m2),
            ),
            1.0 / (12.0 * h),
        );
        let speed = norm(d1);
        let tol = 1e-6 + 2.0 * h.powi(4) * (1.0 + k.powi(4));
        if (speed - 1.0).abs() > tol {
            return Err(Error::Geometry(format!(
                "curve is not arc-length parametrized: |r'| = {speed} at sample {i}"
            )));
        }
        if k < 1e-8 {
            return Err(Error::Geometry(format!(
                "curvature vanishes at sample {i}; the Frenet frame is undefined there \
                 (supply curvature and torsion profiles directly)"
            )));
        }
        // r''' by the centered first-difference of the second differences
        let d3 = scale(
            add(
                add(p2, scale(p1, -2.0)),
                add(scale(m1, 2.0), scale(m2, -1.0)),
            ),
            1.0 / (2.0 * h * h * h),
        );
        curvature.push(k);
        torsion.push(dot(cross(d1, d2), d3) / (k * k));
    }
    Ok((
        PeriodicProfile::from_samples(period, curvature)?,
        PeriodicProfile::from_samples(period, torsion)?,
    ))
}
