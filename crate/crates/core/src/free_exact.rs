//! Free theory (g = 0): the closed product formula and its expansion in the
//! relative deviations ε̃ around the symmetric spectrum.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::KineticSpectrum;
use crate::numerics::SignedLogReal;
use crate::binom2;

/// Power sums `p_k = Σ_j ε̃_j^k` for k = 1..=6.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PowerSums {
    p: [f64; 7],
}

impl PowerSums {
    pub fn of(xs: &[f64]) -> Self {
        let mut p = [0.0; 7];
        p[0] = xs.len() as f64;
        for &x in xs {
            let mut xk = 1.0;
            for pk in p.iter_mut().skip(1) {
                xk *= x;
                *pk += xk;
            }
        }
        Self { p }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.p[k]
    }
}

/// `ln Z` of the free theory: `Σ_k ½ln(π/e_k) + Σ_{k<l} ln(π/(e_k + e_l))`.
pub fn log_z_free_product(s: &KineticSpectrum) -> SignedLogReal {
    let e = s.eigenvalues();
    let mut diag = Vec::with_capacity(e.len());
    let mut pairs = Vec::with_capacity(binom2(e.len()));
    for (k, &ek) in e.iter().enumerate() {
        diag.push(0.5 * (PI / ek).ln());
        for &el in &e[k + 1..] {
            pairs.push((PI / (ek + el)).ln());
        }
    }
    SignedLogReal::from_ln(diag.iter().sum::<f64>() + pairs.iter().sum::<f64>())
}

/// `ln[Π_k √(π/e_k) · (π/2ξ)^{N(N-1)/2}]` with `e_k = ξ(1 + ε̃_k)`: the
/// common prefactor of every ε̃-expanded closed form.
pub(crate) fn symmetric_prefactor(xi: f64, eps_tilde: &[f64]) -> f64 {
    let n = eps_tilde.len();
    let diag: f64 = eps_tilde
        .iter()
        .map(|x| 0.5 * (PI / (xi * (1.0 + x))).ln())
        .sum();
    diag + binom2(n) as f64 * (PI / (2.0 * xi)).ln()
}

/// Exponent of the pair-product correction to the symmetric prefactor,
/// `−Σ_{k<l} ln(1 + (ε̃_k + ε̃_l)/2)`, expanded through total degree `order`
/// in ε̃ (products of power sums count with their combined degree).
pub fn pair_correction_series(eps_tilde: &[f64], order: usize) -> Result<f64> {
    if !(2..=6).contains(&order) {
        return Err(Error::Domain(format!("expansion order must be in 2..=6, got {order}")));
    }
    let n = eps_tilde.len() as f64;
    let p = PowerSums::of(eps_tilde);
    let (p2, p3, p4, p5, p6) = (p.get(2), p.get(3), p.get(4), p.get(5), p.get(6));
    let by_degree = [
        (n - 2.0) / 8.0 * p2,
        -(n - 4.0) / 24.0 * p3,
        (n - 8.0) / 64.0 * p4 + 3.0 / 64.0 * p2 * p2,
        -(n - 16.0) / 160.0 * p5 - p2 * p3 / 16.0,
        (n - 32.0) / 384.0 * p6 + 5.0 / 128.0 * p2 * p4 + 5.0 / 192.0 * p3 * p3,
    ];
    Ok(by_degree[..order - 1].iter().sum())
}

/// Free `ln Z` from the ε̃-expansion of the pair product, truncated at total
/// degree `order ∈ 2..=6`.
pub fn log_z_free_epsilon_expansion(
    xi: f64,
    eps_tilde: &[f64],
    order: usize,
) -> Result<SignedLogReal> {
    if let Some(bad) = eps_tilde.iter().find(|x| !(x.abs() < 1.0)) {
        return Err(Error::Domain(format!("expansion needs |ε̃| < 1, got {bad}")));
    }
    let corr = pair_correction_series(eps_tilde, order)?;
    Ok(SignedLogReal::from_ln(symmetric_prefactor(xi, eps_tilde) + corr))
}
