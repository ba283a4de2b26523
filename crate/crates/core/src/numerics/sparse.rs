//! Compressed sparse row storage for complex Hermitian operators.
//!
//! Only the handful of kernels the fiber assembly needs: triplet
//! accumulation, mat-vec, conjugate transpose, and the sparse triple product
//! `L^H diag(w) L` that turns a first-order difference operator into a
//! Hermitian stiffness matrix. Rows keep ascending column order, so the
//! triple product accumulates conjugate entry pairs in the same order and the
//! result is Hermitian to the last bit.

use num_complex::Complex64;

/// Triplet accumulator; duplicates are summed on build.
pub struct CooBuilder {
    dim: usize,
    entries: Vec<(u32, u32, Complex64)>,
}

impl CooBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row as u32, col as u32, value));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries
            .sort_unstable_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut counts = vec![0usize; self.dim];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(u32, u32)> = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                counts[r as usize] += 1;
                last = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        for i in 0..self.dim {
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        CsrMatrix {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[Complex64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// y = A x
    pub fn spmv(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..hi {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// A^H in CSR form.
    pub fn conj_transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.dim + 1];
        for &c in &self.col_idx {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.dim {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut col_idx = vec![0u32; self.nnz()];
        let mut values = vec![Complex64::new(0.0, 0.0); self.nnz()];
        let mut next = counts;
        for i in 0..self.dim {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[k] as usize;
                let slot = next[c];
                next[c] += 1;
                col_idx[slot] = i as u32;
                values[slot] = self.values[k].conj();
            }
        }
        CsrMatrix {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Scales row i by d[i] (used for diagonal-weight products).
    pub fn scale_rows(&self, d: &[f64]) -> CsrMatrix {
        debug_assert_eq!(d.len(), self.dim);
        let mut out = self.clone();
        for i in 0..self.dim {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                out.values[k] *= d[i];
            }
        }
        out
    }

    /// Sparse product self * other with a dense per-row accumulator.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx: Vec<u32> = Vec::new();
        let mut values: Vec<Complex64> = Vec::new();
        row_ptr.push(0);
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut seen = vec![false; n];
        let mut touched: Vec<u32> = Vec::new();
        for i in 0..n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k] as usize;
                for k2 in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.col_idx[k2] as usize;
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c as u32);
                    }
                    acc[c] += a * other.values[k2];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_idx.push(c);
                values.push(acc[c as usize]);
                acc[c as usize] = Complex64::new(0.0, 0.0);
                seen[c as usize] = false;
            }
            touched.clear();
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            dim: n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Adds another matrix entrywise.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.dim, other.dim);
        let mut b = CooBuilder::new(self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                b.push(i, *c as usize, *v);
            }
            let (cols, vals) = other.row(i);
            for (c, v) in cols.iter().zip(vals) {
                b.push(i, *c as usize, *v);
            }
        }
        b.build()
    }

    /// Adds `d[i] * scale` to the diagonal.
    pub fn add_diagonal(&self, d: &[f64], scale: f64) -> CsrMatrix {
        let mut b = CooBuilder::new(self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                b.push(i, *c as usize, *v);
            }
            b.push(i, i, Complex64::new(d[i] * scale, 0.0));
        }
        b.build()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                if *c as usize == i {
                    d[i] = *v;
                }
            }
        }
        d
    }

    /// Max |A_ij - conj(A_ji)| over the stored pattern.
    pub fn hermiticity_error(&self) -> f64 {
        let at = self.conj_transpose();
        let mut err: f64 = 0.0;
        for i in 0..self.dim {
            let (ca, va) = self.row(i);
            let (cb, vb) = at.row(i);
            // both rows are sorted; walk them together
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                match (ca.get(p), cb.get(q)) {
                    (Some(&c1), Some(&c2)) if c1 == c2 => {
                        err = err.max((va[p] - vb[q]).norm());
                        p += 1;
                        q += 1;
                    }
                    (Some(&c1), Some(&c2)) if c1 < c2 => {
                        err = err.max(va[p].norm());
                        p += 1;
                    }
                    (Some(_), Some(_)) => {
                        err = err.max(vb[q].norm());
                        q += 1;
                    }
                    (Some(_), None) => {
                        err = err.max(va[p].norm());
                        p += 1;
                    }
                    (None, Some(_)) => {
                        err = err.max(vb[q].norm());
                        q += 1;
                    }
                    (None, None) => break,
                }
            }
        }
        err
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                m[(i, *c as usize)] += *v;
            }
        }
        m
    }
}

impl CsrMatrix {
    /// `(A + A^H) / 2`. The averaged entries mirror into exact floating-point
    /// conjugates, so `hermiticity_error` of the result is bitwise zero.
    pub fn hermitianize(&self) -> CsrMatrix {
        let at = self.conj_transpose();
        let mut b = CooBuilder::new(self.dim);
        for i in 0..self.dim {
            let (ca, va) = self.row(i);
            let (cb, vb) = at.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let c1 = ca.get(p).copied();
                let c2 = cb.get(q).copied();
                match (c1, c2) {
                    (Some(c1), Some(c2)) if c1 == c2 => {
                        b.push(i, c1 as usize, 0.5 * (va[p] + vb[q]));
                        p += 1;
                        q += 1;
                    }
                    (Some(c1), Some(c2)) if c1 < c2 => {
                        b.push(i, c1 as usize, 0.5 * va[p]);
                        p += 1;
                    }
                    (Some(_), Some(c2)) => {
                        b.push(i, c2 as usize, 0.5 * vb[q]);
                        q += 1;
                    }
                    (Some(c1), None) => {
                        b.push(i, c1 as usize, 0.5 * va[p]);
                        p += 1;
                    }
                    (None, Some(c2)) => {
                        b.push(i, c2 as usize, 0.5 * vb[q]);
                        q += 1;
                    }
                    (None, None) => break,
                }
            }
        }
        b.build()
    }
}

/// `L^H diag(w) L` — the Hermitian form matrix of a weighted first-order
/// operator. The raw sparse product carries last-ulp asymmetry from
/// floating-point evaluation order, so the result is hermitianized; the
/// averaging changes entries by at most one rounding step of the product.
pub fn hermitian_triple_product(l: &CsrMatrix, w: &[f64]) -> CsrMatrix {
    let lh = l.conj_transpose();
    let wl = l.scale_rows(w);
    lh.matmul(&wl).hermitianize()
}
