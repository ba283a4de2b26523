//! The full 3D fiber operator at fixed thickness and quasimomentum.
//!
//! The quadratic form
//!
//! ```text
//! t(phi) = int (1/beta) |(-i D + theta) phi|^2
//!        + (beta/eps^2) |grad_y phi|^2 + c beta |phi|^2,
//!   D phi = phi' + (tau + alpha') <grad_y phi, R y>
//! ```
//!
//! is discretized directly: the covariant derivative lives on longitudinal
//! cells (two-point difference at the cell midpoint, the transverse
//! rotation stencil and the theta term averaged over the two end slices,
//! coefficients sampled at the midpoint), and the transverse Dirichlet part
//! reuses the cross-section cut-edge stencil slice by slice. The assembled
//! pencil `(A, M)` is Hermitian with diagonal positive mass by construction.

mod reduction;
mod solve;
mod union;

pub use reduction::{
    reference_eigenvalues, stencil_twist_constant, validate_reduction, ReductionOptions,
    ReductionReport, ReductionRow,
};
pub use solve::{solve_fiber_3d, FiberPreconditioner, TransverseBasis};
pub use union::{spectrum_union, SpectrumUnion};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{validate_thickness, WaveguideGeometry};
use crate::numerics::{hermitian_triple_product, CooBuilder, CsrMatrix};
use crate::section::SectionMask;

/// Discretization of one fiber problem: grid metadata plus the sampled
/// coefficient fields.
#[derive(Debug, Clone)]
pub struct FiberGrid {
    pub n_s: usize,
    pub epsilon: f64,
    pub theta: f64,
    pub period: f64,
    /// `beta_eps(s_i, y_j)` on nodes, slice-major.
    pub beta_nodes: Vec<f64>,
    /// `(tau + alpha')(s)` at cell midpoints.
    pub twist_mid: Vec<f64>,
}

/// Assembled generalized pencil `A x = E M x` with diagonal mass.
#[derive(Debug)]
pub struct FiberProblem {
    stiffness: CsrMatrix,
    mass: Vec<f64>,
    grid: FiberGrid,
    ny: usize,
}

/// Transverse rotation stencil `<grad_y ., R y>`: per node, the centered
/// differences weighted by `(-y2, y1)`, exterior neighbors dropped.
pub(crate) fn rotation_stencil(mask: &SectionMask) -> Vec<Vec<(u32, f64)>> {
    let h = mask.h();
    let ny = mask.node_count();
    let mut rows = Vec::with_capacity(ny);
    for m in 0..ny {
        let (i, j) = mask.nodes()[m];
        let y = mask.coords(m);
        let mut row = Vec::with_capacity(4);
        let mut push = |idx: Option<usize>, w: f64| {
            if let Some(q) = idx {
                row.push((q as u32, w));
            }
        };
        push(mask.node_index(i + 1, j), -y[1] / (2.0 * h));
        push(mask.node_index(i - 1, j), y[1] / (2.0 * h));
        push(mask.node_index(i, j + 1), y[0] / (2.0 * h));
        push(mask.node_index(i, j - 1), -y[0] / (2.0 * h));
        rows.push(row);
    }
    rows
}

/// Builds the fiber pencil for the given geometry, section mask,
/// longitudinal resolution and quasimomentum.
pub fn assemble_fiber(
    g: &WaveguideGeometry,
    mask: &SectionMask,
    n_s: usize,
    theta: f64,
) -> Result<FiberProblem> {
    let l = g.period();
    if n_s < 16 || n_s % 2 != 0 {
        return Err(Error::Config(format!(
            "longitudinal node count must be even and at least 16, got {n_s}"
        )));
    }
    if theta.abs() > PI / l * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "quasimomentum {theta} outside the Brillouin zone [-pi/L, pi/L]"
        )));
    }
    if !validate_thickness(g, mask.radius()) {
        return Err(Error::Geometry(format!(
            "thickness guard failed: eps * max|k| * section radius = {:.3} >= {}",
            g.epsilon() * g.curvature().max_abs() * mask.radius(),
            1.0 - crate::geometry::BETA_MARGIN
        )));
    }

    let ny = mask.node_count();
    let n = n_s * ny;
    let h = mask.h();
    let ds = l / n_s as f64;
    let eps = g.epsilon();
    let vol = ds * h * h;
    let rot = rotation_stencil(mask);

    // covariant derivative on cells
    let mut lb = CooBuilder::new(n);
    let mut w_long = vec![0.0; n];
    let mut twist_mid = Vec::with_capacity(n_s);
    for i in 0..n_s {
        let ip = (i + 1) % n_s;
        let s_mid = (i as f64 + 0.5) * ds;
        let tw = g.twist_rate_at(s_mid);
        twist_mid.push(tw);
        for j in 0..ny {
            let row = i * ny + j;
            let half_theta = Complex64::new(0.0, 0.5 * theta);
            lb.push(row, i * ny + j, Complex64::new(-1.0 / ds, 0.0) + half_theta);
            lb.push(row, ip * ny + j, Complex64::new(1.0 / ds, 0.0) + half_theta);
            for &(q, w) in &rot[j] {
                let c = Complex64::new(0.5 * tw * w, 0.0);
                lb.push(row, i * ny + q as usize, c);
                lb.push(row, ip * ny + q as usize, c);
            }
            w_long[row] = vol / g.beta(s_mid, mask.coords(j));
        }
    }
    let a_long = hermitian_triple_product(&lb.build(), &w_long);

    // transverse Dirichlet part slice by slice (each undirected edge once,
    // midpoints from lattice indices so paired entries share the exact
    // coefficient), plus the mass
    let mut tb = CooBuilder::new(n);
    let mut mass = vec![0.0; n];
    let scale = ds / (eps * eps);
    for i in 0..n_s {
        let s = i as f64 * ds;
        for m in 0..ny {
            let (mi, mj) = mask.nodes()[m];
            let row = i * ny + m;
            mass[row] = g.beta(s, mask.coords(m)) * vol;
            for d in [(1, 0), (0, 1)] {
                if let Some(q) = mask.node_index(mi + d.0, mj + d.1) {
                    let mid = [
                        (mi as f64 + 0.5 * d.0 as f64) * h,
                        (mj as f64 + 0.5 * d.1 as f64) * h,
                    ];
                    let w = scale * g.beta(s, mid);
                    let col = i * ny + q;
                    tb.push(row, row, Complex64::new(w, 0.0));
                    tb.push(col, col, Complex64::new(w, 0.0));
                    tb.push(row, col, Complex64::new(-w, 0.0));
                    tb.push(col, row, Complex64::new(-w, 0.0));
                }
            }
            for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if mask.node_index(mi + d.0, mj + d.1).is_none() {
                    let a = mask.cut_fraction(mi, mj, d);
                    let mid = [
                        (mi as f64 + 0.5 * a * d.0 as f64) * h,
                        (mj as f64 + 0.5 * a * d.1 as f64) * h,
                    ];
                    tb.push(row, row, Complex64::new(scale * g.beta(s, mid) / a, 0.0));
                }
            }
        }
    }
    let a_trans = tb.build();

    let stiffness = a_long
        .add(&a_trans)
        .add_diagonal(&mass, g.energy_shift());

    let mut beta_nodes = Vec::with_capacity(n);
    for i in 0..n_s {
        let s = i as f64 * ds;
        for m in 0..ny {
            beta_nodes.push(g.beta(s, mask.coords(m)));
        }
    }
    debug_assert!(beta_nodes.iter().all(|&b| b >= crate::geometry::BETA_MARGIN));

    Ok(FiberProblem {
        stiffness,
        mass,
        grid: FiberGrid {
            n_s,
            epsilon: eps,
            theta,
            period: l,
            beta_nodes,
            twist_mid,
        },
        ny,
    })
}

impl FiberProblem {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn grid(&self) -> &FiberGrid {
        &self.grid
    }

    pub fn section_count(&self) -> usize {
        self.ny
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.stiffness.hermiticity_error()
    }
}

/// The 1D longitudinal pencil `(A_s, ds I)` of the staggered covariant
/// derivative, without any potential: cell contributions
/// `conj(c_u) c_v ds` with `c = -1/ds + i theta/2` at the left node and
/// `+1/ds + i theta/2` at the right. Shared by the separable oracle, the
/// reduction reference and the fiber preconditioner.
pub fn longitudinal_matrix(n_s: usize, period: f64, theta: f64) -> nalgebra::DMatrix<Complex64> {
    let ds = period / n_s as f64;
    let mut a = nalgebra::DMatrix::<Complex64>::zeros(n_s, n_s);
    let coeff_l = Complex64::new(-1.0 / ds, 0.5 * theta);
    let coeff_r = Complex64::new(1.0 / ds, 0.5 * theta);
    for i in 0..n_s {
        let ip = (i + 1) % n_s;
        for (u, cu) in [(i, coeff_l), (ip, coeff_r)] {
            for (v, cv) in [(i, coeff_l), (ip, coeff_r)] {
                a[(u, v)] += cu.conj() * cv * ds;
            }
        }
    }
    a
}
