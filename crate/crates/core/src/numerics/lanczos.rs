//! Shift-invert Lanczos for the generalized Hermitian pencil `A x = E M x`
//! with diagonal positive mass `M`.
//!
//! The Krylov recurrence runs on `Op = (A - sigma M)^{-1} M` in the M-inner
//! product, with full reorthogonalization. Inner solves use preconditioned
//! conjugate gradients (the shifted operator is positive definite whenever
//! `sigma` sits below the lowest eigenvalue; an indefiniteness signal from CG
//! triggers an automatic shift decrease). The start vector is seeded, so the
//! whole solve is deterministic.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct EigOptions {
    /// Cap on Lanczos steps (Krylov dimension).
    pub max_steps: usize,
    /// Convergence target for the true residual `||A x - E M x|| / ||x||`.
    pub residual_tol: f64,
    /// Relative residual target of the inner CG solves.
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    pub seed: u64,
    /// Retries with a decreased shift when the shifted operator is indefinite.
    pub max_shift_retries: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            max_steps: 300,
            residual_tol: 1e-8,
            inner_tol: 1e-13,
            inner_max_iter: 20_000,
            seed: 1,
            max_shift_retries: 3,
        }
    }
}

/// Approximate inverse of the shifted operator, applied as `z ~= (A - sigma M)^{-1} r`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[Complex64], z: &mut [Complex64]);
}

/// Diagonal (Jacobi) preconditioner.
pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &CsrMatrix, mass: &[f64], shift: f64) -> Self {
        let diag = a.diagonal();
        let inv_diag = diag
            .iter()
            .zip(mass)
            .map(|(d, m)| {
                let v = d.re - shift * m;
                if v.abs() > 1e-300 {
                    1.0 / v
                } else {
                    1.0
                }
            })
            .collect();
        Self { inv_diag }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[Complex64], z: &mut [Complex64]) {
        for ((z, r), d) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *z = r * *d;
        }
    }
}

pub struct EigenPairs {
    /// Ascending eigenvalues (multiplicity as resolved by the Krylov space).
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<Complex64>>,
    /// True residuals `||A x - E M x|| / ||x||`.
    pub residuals: Vec<f64>,
    pub lanczos_steps: usize,
}

fn dot_m(a: &[Complex64], b: &[Complex64], m: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.len() {
        acc += a[i].conj() * b[i] * m[i];
    }
    acc
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.len() {
        acc += a[i].conj() * b[i];
    }
    acc
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

/// Preconditioned CG for the Hermitian positive definite shifted operator.
/// Returns `Err(LinearSolveStall)` on stagnation and `Err(IndefiniteShift)`
/// when a direction of nonpositive curvature shows up.
fn pcg_solve(
    a: &CsrMatrix,
    mass: &[f64],
    shift: f64,
    pc: &dyn Preconditioner,
    rhs: &[Complex64],
    x: &mut [Complex64],
    tol: f64,
    max_iter: usize,
    scratch: &mut CgScratch,
) -> Result<()> {
    let n = rhs.len();
    let CgScratch { r, z, p, ap } = scratch;
    x.fill(Complex64::new(0.0, 0.0));
    r.copy_from_slice(rhs);
    let rhs_norm = norm(rhs);
    if rhs_norm == 0.0 {
        return Ok(());
    }
    pc.apply(r, z);
    p.copy_from_slice(z);
    let mut rz = dot(r, z).re;
    for _ in 0..max_iter {
        // ap = (A - shift M) p
        a.spmv(p, ap);
        for i in 0..n {
            ap[i] -= shift * mass[i] * p[i];
        }
        let pap = dot(p, ap).re;
        if pap <= 0.0 {
            return Err(Error::IndefiniteShift {
                retries: 0,
                shift,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if norm(r) <= tol * rhs_norm {
            return Ok(());
        }
        pc.apply(r, z);
        let rz_new = dot(r, z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let res = norm(r) / rhs_norm;
    // Accept near-misses: round-off can pin the residual slightly above an
    // aggressive tolerance without harming the outer iteration.
    if res <= tol * 100.0 {
        return Ok(());
    }
    Err(Error::LinearSolveStall {
        iterations: max_iter,
        residual: res,
    })
}

struct CgScratch {
    r: Vec<Complex64>,
    z: Vec<Complex64>,
    p: Vec<Complex64>,
    ap: Vec<Complex64>,
}

impl CgScratch {
    fn new(n: usize) -> Self {
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        Self {
            r: zeros.clone(),
            z: zeros.clone(),
            p: zeros.clone(),
            ap: zeros,
        }
    }
}

/// Eigenvalues of a real symmetric tridiagonal matrix together with the
/// eigenvector matrix (via the dense Hermitian path; the matrices here are
/// the small Lanczos projections).
fn tridiag_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let m = alpha.len();
    let mut t = nalgebra::DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = nalgebra::DMatrix::zeros(m, m);
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// The `k` smallest generalized eigenvalues of `(A, diag(mass))` by
/// shift-invert Lanczos. `shift` must lie below the smallest eigenvalue; if
/// the shifted operator turns out indefinite the shift is decreased
/// automatically (up to `max_shift_retries` times).
pub fn eig_sparse_smallest(
    a: &CsrMatrix,
    mass: &[f64],
    k: usize,
    shift: f64,
    pc: Option<&dyn Preconditioner>,
    opts: &EigOptions,
) -> Result<EigenPairs> {
    let mut sigma = shift;
    let mut last_err = None;
    for retry in 0..=opts.max_shift_retries {
        match lanczos_run(a, mass, k, sigma, pc, opts) {
            Ok(pairs) => return Ok(pairs),
            Err(Error::IndefiniteShift { .. }) => {
                last_err = Some(Error::IndefiniteShift {
                    retries: retry,
                    shift: sigma,
                });
                sigma -= 0.25 * (sigma.abs() + 1.0);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

fn lanczos_run(
    a: &CsrMatrix,
    mass: &[f64],
    k: usize,
    sigma: f64,
    pc: Option<&dyn Preconditioner>,
    opts: &EigOptions,
) -> Result<EigenPairs> {
    let n = a.dim();
    assert!(k >= 1 && k <= n, "requested {k} of {n} eigenvalues");
    let jacobi;
    let pc: &dyn Preconditioner = match pc {
        Some(p) => p,
        None => {
            jacobi = Jacobi::new(a, mass, sigma);
            &jacobi
        }
    };
    let mut scratch = CgScratch::new(n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, 0.0))
        .collect();
    let nv = dot_m(&v, &v, mass).re.sqrt();
    v.iter_mut().for_each(|x| *x /= nv);

    let max_steps = opts.max_steps.min(n);
    let mut basis: Vec<Vec<Complex64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut mv = vec![Complex64::new(0.0, 0.0); n];

    let converged = |alphas: &[f64], betas: &[f64]| -> bool {
        let m = alphas.len();
        if m < k + 1 {
            return false;
        }
        let (vals, vecs) = tridiag_eigen(alphas, &betas[..m - 1]);
        // wanted pairs: largest psi = 1/(E - sigma)
        let b_last = betas[m - 1];
        (0..k).all(|j| {
            let idx = m - 1 - j;
            let psi = vals[idx];
            let est = (b_last * vecs[(m - 1, idx)]).abs();
            psi > 0.0 && est <= 1e-11 * psi.max(1e-300)
        })
    };

    for step in 0..max_steps {
        let vj = basis.last().unwrap().clone();
        for i in 0..n {
            mv[i] = mass[i] * vj[i];
        }
        pcg_solve(
            a,
            mass,
            sigma,
            pc,
            &mv,
            &mut w,
            opts.inner_tol,
            opts.inner_max_iter,
            &mut scratch,
        )?;
        let alpha = dot_m(&vj, &w, mass).re;
        alphas.push(alpha);
        // three-term recurrence, then full reorthogonalization (two passes)
        for _pass in 0..2 {
            for vb in &basis {
                let c = dot_m(vb, &w, mass);
                for i in 0..n {
                    w[i] -= c * vb[i];
                }
            }
        }
        let beta = dot_m(&w, &w, mass).re.sqrt();
        if beta < 1e-14 || step + 1 == max_steps {
            betas.push(beta);
            break;
        }
        betas.push(beta);
        let vnext: Vec<Complex64> = w.iter().map(|x| x / beta).collect();
        basis.push(vnext);
        if (step + 1) % 4 == 0 && converged(&alphas, &betas) {
            break;
        }
    }

    // Ritz extraction
    let m = alphas.len();
    let (vals, vecs) = tridiag_eigen(&alphas, &betas[..m - 1]);
    let mut pairs: Vec<(f64, usize)> = vals
        .iter()
        .enumerate()
        .filter(|(_, &psi)| psi > 0.0)
        .map(|(i, &psi)| (sigma + 1.0 / psi, i))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if pairs.len() < k {
        return Err(Error::SolverNoConvergence {
            iterations: m,
            residuals: vec![],
        });
    }

    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    for &(_, col) in pairs.iter().take(k) {
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (j, vb) in basis.iter().take(m).enumerate() {
            let c = vecs[(j, col)];
            for i in 0..n {
                x[i] += c * vb[i];
            }
        }
        let nx = dot_m(&x, &x, mass).re.sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        // Rayleigh quotient sharpens the value beyond 1/psi when the inner
        // solves were inexact.
        a.spmv(&x, &mut ax);
        let e = dot(&x, &ax).re / dot_m(&x, &x, mass).re;
        let xnorm = norm(&x);
        let mut res = 0.0f64;
        for i in 0..n {
            res += (ax[i] - e * mass[i] * x[i]).norm_sqr();
        }
        let res = res.sqrt() / xnorm;
        values.push(e);
        vectors.push(x);
        residuals.push(res);
    }
    // ascending by refined value
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let vectors: Vec<Vec<Complex64>> = order.iter().map(|&i| vectors[i].clone()).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();

    if residuals.iter().any(|&r| !r.is_finite() || r > opts.residual_tol) {
        return Err(Error::SolverNoConvergence {
            iterations: m,
            residuals,
        });
    }
    Ok(EigenPairs {
        values,
        vectors,
        residuals,
        lanczos_steps: m,
    })
}
