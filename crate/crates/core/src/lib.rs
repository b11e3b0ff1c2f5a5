//! Exact solver and verification toolkit for locally interacting
//! multi-level systems (the atomic limit of Hubbard-type models).
//!
//! The Hamiltonian is `H = sum_a eps_a n_a + U/2 N(N-1)` with `N` the total
//! number operator, for bosons or fermions. Everything is diagonal in the
//! occupation-number basis, so thermodynamics and one-particle Green
//! functions have closed forms; this crate computes them and certifies them
//! against an independent brute-force enumeration oracle.
//!
//! Module map:
//! - [`model`]: system definition, truncation policy, validation
//! - [`quad`]: Gauss-Hermite and uniform-circle quadrature kernels
//! - [`canonical`]: canonical partition functions `Z_N` by two routes
//! - [`thermo`]: grand-canonical thermodynamics and the shifted
//!   Gaussian-decoupling identity check
//! - [`green`]: lesser/greater/spectral line sets and time series
//! - [`oracle`]: occupation-basis enumeration ground truth
//! - [`subtlety`]: coherent-state matrix-element and operator-ordering
//!   demonstrations
//!
//! Node evaluations and basis accumulations run on rayon when the `parallel`
//! feature (default) is enabled; reductions always use the same index-ordered
//! pairwise tree, so results are bit-identical with and without it.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // !(x > 0.0) guards reject NaN
#![allow(clippy::needless_range_loop)] // indexed loops mirror the matrix algebra

pub mod canonical;
pub mod error;
pub mod exec;
pub mod green;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod subtlety;
pub mod thermo;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
