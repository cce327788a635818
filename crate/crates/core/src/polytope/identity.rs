//! The integral identity behind the factorization,
//!
//! ```text
//! Π_{k<l} 1/(e_k + e_l) = ½ ∫₀^∞ dᴺu V_N(u) e^{−u·e}.
//! ```
//!
//! `V_N` is homogeneous of degree `D = N(N−3)/2`, so writing `u = t·v` with
//! `Σv = 1` and integrating `t` in closed form gives
//!
//! ```text
//! rhs = ½ ∫_{Σv=1} d^{N−1}v V_N(v) Γ(D + N)/(v·e)^{D+N}.
//! ```
//!
//! The support is `v_j ≤ ½`. The remaining integral runs over
//! `(v_0, …, v_{N−2})` with `v_{N−1} = 1 − Σ`, by nested adaptive quadrature.

use super::exact::{exact_volume_in_chart, exact_volume_n3};
use super::{fiber_dimension, Chart, DiagonalMarginal};
use crate::error::{Error, Result};
use crate::model::KineticSpectrum;
use crate::numerics::quad::adaptive_gk;
use crate::numerics::{ln_gamma, SignedLogReal};

const REL_TOL: f64 = 1e-7;

/// `(lhs, rhs)` of the identity for N ∈ {3, 4}. For N = 3 the fiber is a
/// point counted with volume 1.
pub fn factorization_identity_check(s: &KineticSpectrum) -> Result<(SignedLogReal, SignedLogReal)> {
    let n = s.n();
    let e = s.eigenvalues();
    let mut log_lhs = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            log_lhs -= (e[k] + e[l]).ln();
        }
    }
    let lhs = log_lhs.exp();
    let power = (fiber_dimension(n) + n) as i32;
    let gamma = ln_gamma(f64::from(power))?.exp();
    let weight = |v: &[f64]| -> f64 {
        let ve: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
        gamma / ve.powi(power)
    };
    let rhs = match n {
        3 => {
            let f = |v0: f64| {
                let inner = |v1: f64| {
                    let v = [v0, v1, 1.0 - v0 - v1];
                    let vol = DiagonalMarginal::new(v.to_vec())
                        .and_then(|m| exact_volume_n3(&m))
                        .map(|x| x.value.to_f64())
                        .unwrap_or(0.0);
                    vol * weight(&v)
                };
                adaptive_gk(inner, (0.5 - v0).max(0.0), 0.5, REL_TOL * lhs).0
            };
            0.5 * adaptive_gk(f, 0.0, 0.5, REL_TOL * lhs).0
        }
        4 => {
            let chart = Chart::new(4)?;
            let volume = |v: &[f64]| -> f64 {
                match DiagonalMarginal::new(v.to_vec()) {
                    Ok(m) => exact_volume_in_chart(&chart, &m).value.to_f64(),
                    Err(_) => 0.0,
                }
            };
            let f = |v0: f64| {
                let middle = |v1: f64| {
                    let lo = (0.5 - v0 - v1).max(0.0);
                    let hi = (1.0 - v0 - v1).min(0.5);
                    if hi <= lo {
                        return 0.0;
                    }
                    let inner = |v2: f64| {
                        let v = [v0, v1, v2, (1.0 - v0 - v1 - v2).max(0.0)];
                        volume(&v) * weight(&v)
                    };
                    adaptive_gk(inner, lo, hi, REL_TOL * lhs).0
                };
                adaptive_gk(middle, 0.0, 0.5, REL_TOL * lhs).0
            };
            0.5 * adaptive_gk(f, 0.0, 0.5, REL_TOL * lhs).0
        }
        _ => return Err(Error::UnsupportedSize { n, allowed: "N ∈ {3, 4}" }),
    };
    Ok((SignedLogReal::from_ln(log_lhs), SignedLogReal::from_f64(rhs)))
}
