//! Vacuum partition function of the real quartic Hermitian matrix model.
//!
//! The partition function
//!
//! ```text
//! Z[0] = ∫ dX exp(-Tr(E X² + g X⁴))
//! ```
//!
//! over N×N Hermitian matrices is evaluated along several independent routes
//! (closed product formula, eigenvalue-integral quadrature, Gaussian matrix
//! Monte Carlo, and the closed forms obtained by integrating against the
//! asymptotic volume of diagonal subpolytopes of symmetric stochastic
//! matrices). The [`harness`] module cross-compares them.
//!
//! All partition-function values are carried as [`SignedLogReal`] so that
//! prefactors like `(π/2ξ)^{N(N-1)/2}` never overflow.

pub mod eigenrep;
pub mod error;
pub mod factorized;
pub mod free_exact;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod polytope;

pub use error::{Error, Result};
pub use model::{Coupling, KineticSpectrum, PvRegulator};
pub use numerics::SignedLogReal;

/// Number of unordered pairs `N(N-1)/2`.
#[inline]
pub fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}
