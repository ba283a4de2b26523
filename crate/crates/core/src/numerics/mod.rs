//! Shared linear-algebra kernels: dense Hermitian eigensolver, sparse
//! Hermitian generalized eigensolver (shift-invert Lanczos), FFT wrappers.
//!
//! All solvers are deterministic given a seed; internal randomization is
//! limited to the Lanczos start vector.

pub mod dense;
pub mod fft;
pub mod lanczos;
pub mod sparse;

pub use dense::DenseHermitian;
pub use lanczos::{eig_sparse_smallest, EigOptions, EigenPairs, Jacobi, Preconditioner};
pub use sparse::{hermitian_triple_product, CooBuilder, CsrMatrix};
