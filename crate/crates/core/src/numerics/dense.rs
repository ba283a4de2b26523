//! Dense Hermitian eigensolver.
//!
//! Backed by nalgebra's Householder tridiagonalization + implicit QL
//! (`SymmetricEigen`), which handles complex Hermitian matrices. The contract
//! is the residual bound `||A x - lambda x|| <= 1e-10 ||A||` per returned
//! pair; the test suite asserts it on every run.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Column-major dense Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DenseHermitian {
    data: DMatrix<Complex64>,
}

impl DenseHermitian {
    /// Wraps a square matrix, verifying Hermiticity entrywise to
    /// `1e-14 * scale` where `scale` is the largest entry magnitude.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Config(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        let m = Self { data };
        let scale = m.max_abs().max(1.0);
        let err = m.hermiticity_error();
        if err > 1e-14 * scale {
            return Err(Error::Config(format!(
                "matrix is not Hermitian: max |A - A^H| = {err:.3e}"
            )));
        }
        Ok(m)
    }

    /// Builds from an entry function; the strict upper triangle is mirrored
    /// so the result is Hermitian by construction.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            data[(i, i)] = Complex64::new(f(i, i).re, 0.0);
            for j in (i + 1)..dim {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v.conj();
            }
        }
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                err = err.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// The `k` smallest eigenvalues, ascending, multiplicity counted.
    pub fn eigenvalues_smallest(&self, k: usize) -> Result<Vec<f64>> {
        let (vals, _) = self.eigen_pairs_smallest(k)?;
        Ok(vals)
    }

    /// The `k` smallest eigenpairs; eigenvectors are the columns, orthonormal.
    pub fn eigen_pairs_smallest(&self, k: usize) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let n = self.dim();
        if k > n {
            return Err(Error::Config(format!(
                "requested {k} eigenvalues of a {n}-dimensional matrix"
            )));
        }
        let eig = self.data.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let vals: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vecs = DMatrix::zeros(n, k);
        for (col, &i) in order[..k].iter().enumerate() {
            vecs.set_column(col, &eig.eigenvectors.column(i));
        }
        Ok((vals, vecs))
    }

    /// Max residual `||A x - lambda x||` over the given pairs.
    pub fn residual(&self, vals: &[f64], vecs: &DMatrix<Complex64>) -> f64 {
        let mut worst: f64 = 0.0;
        for (col, &lambda) in vals.iter().enumerate() {
            let x = vecs.column(col);
            let r = &self.data * x - x * Complex64::new(lambda, 0.0);
            worst = worst.max(r.norm());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_matrix() {
        let m = DenseHermitian::from_fn(3, |i, j| {
            if i == j {
                Complex64::new([3.0, 1.0, 2.0][i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let vals = m.eigenvalues_smallest(3).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_swap() {
        let m = DenseHermitian::from_fn(2, |i, j| {
            if i != j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let vals = m.eigenvalues_smallest(2).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_trace_identity_and_residual() {
        let n = 50;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m = DenseHermitian::from_fn(n, |i, j| {
            // from_fn mirrors the upper triangle, so any values work here;
            // the diagonal imaginary part is dropped by construction.
            let _ = (i, j);
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let trace: f64 = (0..n).map(|i| m.matrix()[(i, i)].re).sum();
        let (vals, vecs) = m.eigen_pairs_smallest(n).unwrap();
        let sum: f64 = vals.iter().sum();
        assert!(
            (sum - trace).abs() <= 1e-9 * trace.abs().max(1.0),
            "eigenvalue sum {sum} vs trace {trace}"
        );
        // Residual contract.
        let norm_bound = m.max_abs() * n as f64;
        assert!(m.residual(&vals, &vecs) <= 1e-10 * norm_bound);
    }
}
