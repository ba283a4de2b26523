use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use super::EffectivePotential;
use crate::error::{Error, Result};
use crate::numerics::DenseHermitian;

/// Boundary condition of the one-period operator: periodic realizes the
/// `theta = 0` fiber, antiperiodic the `theta = pi/L` band edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Periodic,
    Antiperiodic,
}

/// Plane-wave Galerkin matrix of the fiber operator
/// `(-i d/ds + theta)^2 + V` on the basis `exp(2 pi i n s / L)/sqrt(L)`,
/// `|n| <= N` (periodic), or `exp((2n+1) pi i s / L)/sqrt(L)` (antiperiodic,
/// where theta is ignored).
#[derive(Debug, Clone)]
pub struct FloquetMatrix {
    matrix: DenseHermitian,
    theta: f64,
    half_width: usize,
    bc: BoundaryCondition,
    period: f64,
}

/// Assembles the fiber matrix. Kinetic part is diagonal; the potential
/// couples modes through `nu_{m-n} / sqrt(L)`. Coefficients beyond the
/// stored range are admitted as zero only while the stored tail stays below
/// `1e-13` (aliasing guard).
pub fn assemble_floquet(
    v: &EffectivePotential,
    theta: f64,
    half_width: usize,
    bc: BoundaryCondition,
) -> Result<FloquetMatrix> {
    let l = v.period();
    if half_width < 8 {
        return Err(Error::Config(format!(
            "basis half-width must be at least 8, got {half_width}"
        )));
    }
    if bc == BoundaryCondition::Periodic && theta.abs() > PI / l * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "quasimomentum {theta} outside the Brillouin zone [-pi/L, pi/L]"
        )));
    }
    let needed = 2 * half_width as i64;
    let stored = v.sample_count() as i64 / 2;
    if needed > stored {
        let tail = v.tail_magnitude();
        if tail >= 1e-13 {
            return Err(Error::Aliasing {
                requested: half_width,
                stored: stored as usize,
                tail,
            });
        }
    }
    let dim = 2 * half_width + 1;
    let sqrt_l = l.sqrt();
    let n_of = |idx: usize| idx as i64 - half_width as i64;
    let matrix = DenseHermitian::from_fn(dim, |row, col| {
        let m = n_of(row);
        let n = n_of(col);
        let mut entry = match v.nu(m - n) {
            Some(nu) => nu / sqrt_l,
            None => Complex64::new(0.0, 0.0),
        };
        if row == col {
            let kinetic = match bc {
                BoundaryCondition::Periodic => (TAU * n as f64 / l + theta).powi(2),
                BoundaryCondition::Antiperiodic => ((2 * n + 1) as f64 * PI / l).powi(2),
            };
            entry += kinetic;
        }
        entry
    });
    Ok(FloquetMatrix {
        matrix,
        theta,
        half_width,
        bc,
        period: l,
    })
}

impl FloquetMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.matrix.hermiticity_error()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.matrix()[(row, col)]
    }
}

/// The `n_max` smallest fiber eigenvalues, ascending with multiplicity.
pub fn solve_fiber_1d(m: &FloquetMatrix, n_max: usize) -> Result<Vec<f64>> {
    m.matrix.eigenvalues_smallest(n_max)
}
