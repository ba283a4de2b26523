use num_complex::Complex64;

use super::SectionMask;
use crate::error::{Error, Result};
use crate::numerics::{eig_sparse_smallest, CooBuilder, CsrMatrix, EigOptions};

/// Ground state and spectral data of the Dirichlet Laplacian on the section.
#[derive(Debug, Clone)]
pub struct SectionSpectrum {
    mask: SectionMask,
    lambda0: f64,
    lambda1: f64,
    u0: Vec<f64>,
    grad_u0: Vec<[f64; 2]>,
    twist_constant: f64,
}

#[derive(Debug, Clone)]
pub struct SectionSolveOptions {
    pub seed: u64,
    pub residual_tol: f64,
}

impl Default for SectionSolveOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            residual_tol: 1e-8,
        }
    }
}

/// The unit-weight 5-point stiffness with cut-edge boundary corrections;
/// eigenvalues of the pencil `(K, h^2 I)` approximate the Dirichlet
/// Laplacian spectrum. Shared with the transverse part of the 3D fiber so
/// the two discretizations agree exactly.
pub fn section_stiffness(mask: &SectionMask) -> CsrMatrix {
    let n = mask.node_count();
    let mut b = CooBuilder::new(n);
    for m in 0..n {
        let (i, j) = mask.nodes()[m];
        let mut diag = 0.0;
        for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            match mask.node_index(i + d.0, j + d.1) {
                Some(q) => {
                    diag += 1.0;
                    b.push(m, q, Complex64::new(-1.0, 0.0));
                }
                None => {
                    diag += 1.0 / mask.cut_fraction(i, j, d);
                }
            }
        }
        b.push(m, m, Complex64::new(diag, 0.0));
    }
    b.build()
}

/// Solves for the two lowest Dirichlet eigenpairs on the mask.
///
/// `u_0` is sign-fixed to be nonnegative (positive at the node nearest the
/// origin) and normalized to `sum u_0^2 h^2 = 1`. The gradient uses centered
/// differences in the interior and the non-uniform 3-point formula against
/// the boundary value 0 next to the boundary.
pub fn solve_section(mask: &SectionMask, opts: &SectionSolveOptions) -> Result<SectionSpectrum> {
    let n = mask.node_count();
    let h = mask.h();
    let stiffness = section_stiffness(mask);
    let mass = vec![h * h; n];
    let eig_opts = EigOptions {
        seed: opts.seed,
        residual_tol: opts.residual_tol,
        ..EigOptions::default()
    };
    let pairs = eig_sparse_smallest(&stiffness, &mass, 2, 0.0, None, &eig_opts)?;
    let lambda0 = pairs.values[0];
    let lambda1 = pairs.values[1];
    if !(lambda0 > 0.0) || !(lambda1 > lambda0) {
        return Err(Error::SolverNoConvergence {
            iterations: pairs.lanczos_steps,
            residuals: pairs.residuals.clone(),
        });
    }

    // ground state: real up to solver round-off
    let mut u0: Vec<f64> = pairs.vectors[0].iter().map(|z| z.re).collect();
    let m0 = (0..n)
        .min_by(|&a, &b| {
            let ra = mask.coords(a);
            let rb = mask.coords(b);
            let da = ra[0] * ra[0] + ra[1] * ra[1];
            let db = rb[0] * rb[0] + rb[1] * rb[1];
            da.partial_cmp(&db).unwrap()
        })
        .unwrap();
    if u0[m0] < 0.0 {
        u0.iter_mut().for_each(|v| *v = -*v);
    }
    let norm: f64 = u0.iter().map(|v| v * v).sum::<f64>() * h * h;
    let scale = norm.sqrt().recip();
    u0.iter_mut().for_each(|v| *v *= scale);

    let grad_u0 = gradient(mask, &u0);
    let twist_constant = twist_constant_cells(mask, &u0);
    Ok(SectionSpectrum {
        mask: mask.clone(),
        lambda0,
        lambda1,
        u0,
        grad_u0,
        twist_constant,
    })
}

fn gradient(mask: &SectionMask, u0: &[f64]) -> Vec<[f64; 2]> {
    let n = mask.node_count();
    let h = mask.h();
    let mut grad = vec![[0.0; 2]; n];
    for m in 0..n {
        let (i, j) = mask.nodes()[m];
        for (axis, step) in [(0usize, (1, 0)), (1usize, (0, 1))] {
            let plus = mask.node_index(i + step.0, j + step.1);
            let minus = mask.node_index(i - step.0, j - step.1);
            let (up, hp) = match plus {
                Some(q) => (u0[q], h),
                None => (0.0, mask.cut_fraction(i, j, step) * h),
            };
            let (um, hm) = match minus {
                Some(q) => (u0[q], h),
                None => (0.0, mask.cut_fraction(i, j, (-step.0, -step.1)) * h),
            };
            // non-uniform 3-point first derivative at the center node
            grad[m][axis] =
                (up * hm * hm - um * hp * hp + u0[m] * (hp * hp - hm * hm)) / (hp * hm * (hp + hm));
        }
    }
    grad
}

/// `C(S)` by cell quadrature: per lattice cell, the bilinear-interpolant
/// gradient at the cell center (exterior corners carry the boundary value 0)
/// and the cell's inside-area as weight. Cut cells get their area from 8x8
/// subsampling. This keeps the integrand's boundary peak inside the
/// quadrature domain, which a node-based midpoint sum misses by O(h).
fn twist_constant_cells(mask: &SectionMask, u0: &[f64]) -> f64 {
    let h = mask.h();
    let origin = mask.origin();
    let mut cells = std::collections::HashSet::new();
    for &(i, j) in mask.nodes() {
        for c in [(i, j), (i - 1, j), (i, j - 1), (i - 1, j - 1)] {
            cells.insert(c);
        }
    }
    const SUB: usize = 8;
    let mut total = 0.0;
    for (ci, cj) in cells {
        let corners = [
            (ci, cj),
            (ci + 1, cj),
            (ci, cj + 1),
            (ci + 1, cj + 1),
        ];
        let mut vals = [0.0; 4];
        let mut n_inside = 0;
        for (t, &(i, j)) in corners.iter().enumerate() {
            if let Some(q) = mask.node_index(i, j) {
                vals[t] = u0[q];
                n_inside += 1;
            }
        }
        let d1 = ((vals[1] + vals[3]) - (vals[0] + vals[2])) / (2.0 * h);
        let d2 = ((vals[2] + vals[3]) - (vals[0] + vals[1])) / (2.0 * h);
        let yc1 = (ci as f64 + 0.5) * h;
        let yc2 = (cj as f64 + 0.5) * h;
        let integrand = (-yc2 * d1 + yc1 * d2).powi(2);
        let area = if n_inside == 4 {
            h * h
        } else {
            // cut cell: subsample the inside-area
            let mut cnt = 0usize;
            for a in 0..SUB {
                for b in 0..SUB {
                    let p = [
                        origin[0] + (ci as f64 + (a as f64 + 0.5) / SUB as f64) * h,
                        origin[1] + (cj as f64 + (b as f64 + 0.5) / SUB as f64) * h,
                    ];
                    if mask.shape().contains(p) {
                        cnt += 1;
                    }
                }
            }
            h * h * cnt as f64 / (SUB * SUB) as f64
        };
        total += integrand * area;
    }
    total
}

/// The twist-coupling constant `C(S)` of the stored ground state.
pub fn twist_coupling_constant(spectrum: &SectionSpectrum) -> f64 {
    twist_constant_cells(&spectrum.mask, &spectrum.u0)
}

impl SectionSpectrum {
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn grad_u0(&self) -> &[[f64; 2]] {
        &self.grad_u0
    }

    /// `C(S)`, computed at solve time by cell quadrature.
    pub fn twist_constant(&self) -> f64 {
        self.twist_constant
    }

    pub fn mask(&self) -> &SectionMask {
        &self.mask
    }

    /// Discrete normalization defect `|sum u_0^2 h^2 - 1|`.
    pub fn normalization_defect(&self) -> f64 {
        let h = self.mask.h();
        (self.u0.iter().map(|v| v * v).sum::<f64>() * h * h - 1.0).abs()
    }

    /// Rows `(y1, y2, u0, d1 u0, d2 u0)` for export.
    pub fn table(&self) -> Vec<[f64; 5]> {
        (0..self.u0.len())
            .map(|m| {
                let y = self.mask.coords(m);
                [y[0], y[1], self.u0[m], self.grad_u0[m][0], self.grad_u0[m][1]]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::section::{rasterize_section, SectionShape};

    /// First zero of the Bessel function J0 by bisection on its power
    /// series, squared — the disk ground-state oracle.
    pub fn j01_squared() -> f64 {
        let j0 = |x: f64| -> f64 {
            // power series sum_k (-1)^k (x/2)^{2k} / (k!)^2, converges fast
            // for x < 4
            let q = x * x / 4.0;
            let mut term = 1.0;
            let mut acc = 1.0;
            for k in 1..60 {
                term *= -q / (k as f64 * k as f64);
                acc += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            acc
        };
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if j0(lo) * j0(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        root * root
    }

    #[test]
    fn bessel_oracle_value() {
        // j_{0,1} = 2.404825557695773
        assert!((j01_squared() - 5.783185962946785).abs() < 1e-10);
    }

    #[test]
    fn disk_ground_state_converges_to_bessel_root() {
        let mask = rasterize_section(SectionShape::disk(1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        let exact = j01_squared();
        assert!(
            (spec.lambda0() - exact).abs() / exact < 1e-3,
            "lambda0 = {} vs {exact}",
            spec.lambda0()
        );
        assert!(spec.normalization_defect() < 1e-10);
        assert!(spec.u0().iter().all(|&v| v > -1e-9));
    }

    #[test]
    fn square_eigenvalues_match_separation_of_variables() {
        let mask = rasterize_section(SectionShape::rectangle(1.0, 1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((spec.lambda0() - 2.0 * pi2).abs() / (2.0 * pi2) < 1e-3);
        assert!((spec.lambda1() - 5.0 * pi2).abs() / (5.0 * pi2) < 3e-3);
    }

    #[test]
    fn disk_ground_state_is_radially_symmetric() {
        let mask = rasterize_section(SectionShape::disk(1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        // nodes at equal lattice radius carry equal u0
        let a = mask.node_index(12, 5).unwrap();
        let b = mask.node_index(5, 12).unwrap();
        let c = mask.node_index(-12, 5).unwrap();
        let d = mask.node_index(5, -12).unwrap();
        let v = spec.u0()[a];
        for m in [b, c, d] {
            assert!((spec.u0()[m] - v).abs() < 1e-3);
        }
    }

    /// Quadrature oracle: C(S) for the unit square from the analytic ground
    /// state u0 = 2 cos(pi y1) cos(pi y2), independent of the eigensolver.
    pub fn square_twist_constant_oracle() -> f64 {
        let n = 2000;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let y1 = (a as f64 + 0.5) / n as f64 - 0.5;
                let y2 = (b as f64 + 0.5) / n as f64 - 0.5;
                let pi = std::f64::consts::PI;
                let d1 = -2.0 * pi * (pi * y1).sin() * (pi * y2).cos();
                let d2 = -2.0 * pi * (pi * y1).cos() * (pi * y2).sin();
                acc += (-y2 * d1 + y1 * d2).powi(2);
            }
        }
        acc / (n * n) as f64
    }

    #[test]
    fn square_twist_constant_matches_analytic_oracle() {
        let oracle = square_twist_constant_oracle();
        // closed form: pi^2/6 - 3/2
        assert!((oracle - (std::f64::consts::PI.powi(2) / 6.0 - 1.5)).abs() < 1e-6);
        let mask = rasterize_section(SectionShape::rectangle(1.0, 1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        let c = spec.twist_constant();
        assert!(
            (c - oracle).abs() / oracle < 0.02,
            "C(square) = {c} vs oracle {oracle}"
        );
        assert!((twist_coupling_constant(&spec) - c).abs() < 1e-15);
    }

    #[test]
    fn disk_twist_constant_is_tiny() {
        let mask = rasterize_section(SectionShape::disk(1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        assert!(spec.twist_constant() < 5e-3);
    }

    #[test]
    fn wide_rectangle_couples_to_twist() {
        let mask = rasterize_section(SectionShape::rectangle(2.0, 1.0), 1.0 / 32.0, None).unwrap();
        let spec = solve_section(&mask, &SectionSolveOptions::default()).unwrap();
        assert!(spec.twist_constant() > 0.01);
    }

    #[test]
    fn rotating_the_section_by_90_degrees_changes_nothing() {
        let opts = SectionSolveOptions::default();
        let a = solve_section(
            &rasterize_section(SectionShape::rectangle(2.0, 1.0), 1.0 / 24.0, None).unwrap(),
            &opts,
        )
        .unwrap();
        let b = solve_section(
            &rasterize_section(SectionShape::rectangle(1.0, 2.0), 1.0 / 24.0, None).unwrap(),
            &opts,
        )
        .unwrap();
        assert!((a.lambda0() - b.lambda0()).abs() < 1e-10);
        assert!((a.lambda1() - b.lambda1()).abs() < 1e-10);
        assert!((a.twist_constant() - b.twist_constant()).abs() < 1e-10);
    }

    #[test]
    fn grid_convergence_is_second_order() {
        // Richardson ratio (l(h) - l(h/2)) / (l(h/2) - l(h/4)) in [3, 5]
        for shape in [SectionShape::disk(1.0), SectionShape::rectangle(1.0, 1.0)] {
            let lam: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]
                .iter()
                .map(|&h| {
                    let mask = rasterize_section(shape.clone(), h, None).unwrap();
                    solve_section(&mask, &SectionSolveOptions::default())
                        .unwrap()
                        .lambda0()
                })
                .collect();
            let ratio = (lam[0] - lam[1]) / (lam[1] - lam[2]);
            assert!(
                (3.0..=5.0).contains(&ratio),
                "Richardson ratio {ratio} for {shape:?}"
            );
        }
    }
}
