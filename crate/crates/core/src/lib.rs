//! Spectral toolkit for thin periodic twisted waveguides.
//!
//! Computes the low spectrum of the Dirichlet Laplacian on a thin tube that
//! follows an `L`-periodic space curve while its cross-section rotates, via
//! the effective one-dimensional Floquet operator
//!
//! ```text
//! T^theta w = (-i d/ds + theta)^2 w + [ C(S) (tau + alpha')^2 + c - k^2/4 ] w
//! ```
//!
//! on one period with periodic boundary conditions. The crate provides
//!
//! - [`geometry`]: periodic curvature/torsion/twist profiles, validation,
//!   the gamma-scaling of the geometry, and Frenet recovery of `k`, `tau`
//!   from curve samples;
//! - [`section`]: the 2D Dirichlet eigenproblem on the cross-section
//!   (ground state, spectral gap, and the twist-coupling constant `C(S)`);
//! - [`effective`]: the effective potential, its Fourier coefficients,
//!   plane-wave Floquet fibers, band structure, gaps, and the first-order
//!   gap-width asymptotics;
//! - [`fiber`]: the full 3D fiber operator at fixed thickness and
//!   quasimomentum, used to validate the dimensional reduction
//!   `E_n(eps, theta) = lambda_0/eps^2 + kappa_n(theta) + O(eps)`;
//! - [`numerics`]: the dense/sparse Hermitian eigensolvers and FFT kernels
//!   behind everything else.

pub mod effective;
pub mod error;
pub mod section;
pub mod geometry;
pub mod numerics;

pub use error::{Error, Result};
