//! Eigenvalue-integral representation of Z[0] and the independent oracles
//! that check it.

mod identities;
mod matrix_mc;
mod quadrature;
mod vandermonde;
mod wick;

pub use identities::{pv_kernel_check, vandermonde_limit_check, MAX_LIMIT_CHECK_N};
pub use matrix_mc::{log_z_matrix_mc, HermitianSample, McEstimate};
pub use quadrature::{eigen_integrand, log_z_eigen_quadrature, MAX_QUADRATURE_N};
pub use vandermonde::{vandermonde, vandermonde_ratio, EigenvalueVector};
pub use wick::wick_first_order;
