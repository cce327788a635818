//! Closed forms obtained by integrating against the asymptotic polytope
//! volume: the free-theory result, the weak-coupling partition function in
//! raw and ε̃-expanded form, and the pieces they are assembled from.

use std::f64::consts::PI;

use serde::Serialize;

use crate::binom2;
use crate::eigenrep::vandermonde;
use crate::error::{Error, Result};
use crate::free_exact::{symmetric_prefactor, PowerSums};
use crate::model::{Coupling, KineticSpectrum};
use crate::numerics::quad::adaptive_gk;
use crate::numerics::SignedLogReal;

fn check_expansion_input(xi: f64, eps_tilde: &[f64]) -> Result<()> {
    if !(xi.is_finite() && xi > 0.0) {
        return Err(Error::Domain(format!("ξ must be positive, got {xi}")));
    }
    if eps_tilde.is_empty() {
        return Err(Error::Domain("ε̃ is empty".into()));
    }
    if let Some(bad) = eps_tilde.iter().find(|x| !(x.abs() < 1.0)) {
        return Err(Error::Domain(format!("expansion needs |ε̃| < 1, got {bad}")));
    }
    Ok(())
}

/// Exponent of the free-theory result of the polytope route, relative to
/// `Π√(π/e_k)·(π/2ξ)^{N(N−1)/2}`.
pub fn free_polytope_series(eps_tilde: &[f64]) -> f64 {
    let n = eps_tilde.len() as f64;
    let p = PowerSums::of(eps_tilde);
    let (p2, p3, p4) = (p.get(2), p.get(3), p.get(4));
    (n - 2.0) / 8.0 * p2 - (n - 6.0) / 24.0 * p3 + n / 64.0 * p4 + 3.0 / 64.0 * p2 * p2
        - p2 * p3 / 16.0
        + 7.0 / 128.0 * p2 * p4
        + 3.0 / 128.0 * p3 * p3
        - 5.0 / 128.0 * p3 * p4
        + p2.powi(3) / (16.0 * n)
        - 11.0 / (128.0 * n) * p2 * p2 * p3
}

/// Free `ln Z` from the polytope route in the ε̃ parameterization.
pub fn log_z_free_polytope_route(xi: f64, eps_tilde: &[f64]) -> Result<SignedLogReal> {
    check_expansion_input(xi, eps_tilde)?;
    Ok(SignedLogReal::from_ln(
        symmetric_prefactor(xi, eps_tilde) + free_polytope_series(eps_tilde),
    ))
}

/// Weak-coupling partition function
///
/// ```text
/// √((N−1)/N) [Π_m √(π/e_m) e_m^{1−N}] (πN/(2Σ_m e_m⁻¹))^{N(N−1)/2} exp[−Σ_m 3g/(4e_m²)]
/// ```
pub fn log_z_weak_coupling(s: &KineticSpectrum, g: Coupling) -> Result<SignedLogReal> {
    let n = s.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, allowed: "N ≥ 2" });
    }
    let nf = n as f64;
    let e = s.eigenvalues();
    let inv_sum: f64 = e.iter().map(|x| 1.0 / x).sum();
    let per_mode: f64 = e
        .iter()
        .map(|&x| 0.5 * (PI / x).ln() + (1.0 - nf) * x.ln())
        .sum();
    let log = 0.5 * ((nf - 1.0) / nf).ln()
        + per_mode
        + binom2(n) as f64 * (PI * nf / (2.0 * inv_sum)).ln()
        + quartic_shift(e, g);
    Ok(SignedLogReal::from_ln(log))
}

/// `−Σ_m 3g/(4e_m²)`.
fn quartic_shift(e: &[f64], g: Coupling) -> f64 {
    -e.iter().map(|x| 3.0 * g.value() / (4.0 * x * x)).sum::<f64>()
}

/// Exponent of the ε̃-expanded weak-coupling form, relative to
/// `Π√(π/e_m)·(π/2ξ)^{N(N−1)/2}·exp[−Σ3g/(4e_m²)]`.
pub fn weak_coupling_series(eps_tilde: &[f64]) -> f64 {
    let n = eps_tilde.len() as f64;
    let p = PowerSums::of(eps_tilde);
    let (p2, p3, p4, p5, p6) = (p.get(2), p.get(3), p.get(4), p.get(5), p.get(6));
    let m1 = n - 1.0;
    m1 / 6.0 * p3 - m1 / 4.0 * p4 + 3.0 * m1 / 10.0 * p5 - m1 / 3.0 * p6
        + m1 / (4.0 * n) * p2 * p2
        - 0.5 * p2 * p3
        + 0.5 * p2 * p4
        + 0.25 * p3 * p3
        - p2.powi(3) / (6.0 * n)
}

/// Weak-coupling `ln Z` in the ε̃ parameterization. Unlike
/// [`log_z_weak_coupling`] this form carries no `√((N−1)/N)` factor.
pub fn log_z_weak_coupling_epsilon(
    xi: f64,
    eps_tilde: &[f64],
    g: Coupling,
) -> Result<SignedLogReal> {
    check_expansion_input(xi, eps_tilde)?;
    let e: Vec<f64> = eps_tilde.iter().map(|x| xi * (1.0 + x)).collect();
    Ok(SignedLogReal::from_ln(
        symmetric_prefactor(xi, eps_tilde) + quartic_shift(&e, g) + weak_coupling_series(eps_tilde),
    ))
}

/// The `l = 0` term of the final Λ-integral,
///
/// ```text
/// Q₀ = √π ((N−1)/N) √(Σe⁻¹) (N/((N−1)Σe⁻¹))^{N(N−1)/2} Δ(1/e₁, …, 1/e_N),
/// ```
///
/// with eigenvalues in the stored (ascending) order.
pub fn q0_term(s: &KineticSpectrum) -> Result<SignedLogReal> {
    let n = s.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, allowed: "N ≥ 2" });
    }
    s.require_distinct()?;
    let nf = n as f64;
    let inv: Vec<f64> = s.eigenvalues().iter().map(|x| 1.0 / x).collect();
    let inv_sum: f64 = inv.iter().sum();
    let log = 0.5 * PI.ln() + ((nf - 1.0) / nf).ln() + 0.5 * inv_sum.ln()
        + binom2(n) as f64 * (nf / ((nf - 1.0) * inv_sum)).ln();
    Ok(SignedLogReal::from_ln(log) * vandermonde(&inv))
}

/// Right-hand side of `Δ(1/e) = (−1)^{N(N−1)/2} Δ(e) Π_m e_m^{1−N}`.
pub fn reciprocal_vandermonde(e: &[f64]) -> SignedLogReal {
    let n = e.len();
    let nf = n as f64;
    let pow: f64 = e.iter().map(|x| (1.0 - nf) * x.ln()).sum();
    let sign = if binom2(n) % 2 == 0 { 1 } else { -1 };
    vandermonde(e) * SignedLogReal::new(sign, pow)
}

/// `ln ∫dλ e^{−gλ⁴ − eλ²}` by adaptive quadrature, with the leading
/// approximation `½ln(π/e) − 3g/(4e²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuarticIntegral {
    pub exact: f64,
    pub approximation: f64,
}

pub fn quartic_gaussian_log_integral(e: f64, g: f64) -> Result<QuarticIntegral> {
    if !(e.is_finite() && e > 0.0) {
        return Err(Error::Domain(format!("e must be positive, got {e}")));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::Domain(format!("g must be ≥ 0, got {g}")));
    }
    let gauss = 0.5 * (PI / e).ln();
    let approximation = gauss - 3.0 * g / (4.0 * e * e);
    if g == 0.0 {
        return Ok(QuarticIntegral {
            exact: gauss,
            approximation,
        });
    }
    // λ = x/√e: (2/√e) ∫₀^∞ exp(−x² − (g/e²)x⁴) dx; the tail beyond x = 12
    // is below e^{−144}.
    let c = g / (e * e);
    let (half, _) = adaptive_gk(|x| (-x * x - c * x.powi(4)).exp(), 0.0, 12.0, 1e-15);
    Ok(QuarticIntegral {
        exact: (2.0 * half).ln() - 0.5 * e.ln(),
        approximation,
    })
}

/// `2^{N(N−1)/2 − 1}`, the factor the Meijer-G resummation attaches to the
/// `l = 0` term. Applied to the weak-coupling route only on request.
pub fn meijer_factor(n: usize) -> Result<SignedLogReal> {
    if n < 2 {
        return Err(Error::UnsupportedSize { n, allowed: "N ≥ 2" });
    }
    Ok(SignedLogReal::from_ln((binom2(n) as f64 - 1.0) * 2f64.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_exact::{log_z_free_epsilon_expansion, log_z_free_product};
    use crate::numerics::log_log_slope;
    use rand::{Rng, SeedableRng};

    fn spectrum(e: &[f64]) -> KineticSpectrum {
        KineticSpectrum::new(e.to_vec()).unwrap()
    }

    #[test]
    fn polytope_route_at_symmetric_point() {
        for n in [2usize, 5, 10] {
            let eps = vec![0.0; n];
            let a = log_z_free_polytope_route(1.3, &eps).unwrap().ln();
            let b = log_z_free_product(&spectrum(&vec![1.3; n])).ln();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_coefficient_difference_to_direct_expansion() {
        // polytope-route exponent minus expansion exponent = Σε̃³/12 + O(ε̃⁴); with ε̃ = (2δ, −δ, −δ, 0, …), Σε̃³ = 6δ³.
        let n = 10;
        let mut ratios = Vec::new();
        for delta in [1e-2, 3e-3, 1e-3] {
            let mut eps = vec![0.0; n];
            eps[0] = 2.0 * delta;
            eps[1] = -delta;
            eps[2] = -delta;
            let d = log_z_free_polytope_route(1.0, &eps).unwrap().ln()
                - log_z_free_epsilon_expansion(1.0, &eps, 6).unwrap().ln();
            ratios.push(d / (0.5 * delta.powi(3)));
        }
        assert!((ratios[2] - 1.0).abs() < 1e-2, "{ratios:?}");
        assert!((ratios[2] - 1.0).abs() < (ratios[1] - 1.0).abs());
        assert!((ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs());
    }

    #[test]
    fn weak_coupling_symmetric_simplification() {
        for n in [2usize, 3, 7] {
            let nf = n as f64;
            let xi = 1.7;
            let g = Coupling::new(0.03).unwrap();
            let v = log_z_weak_coupling(&spectrum(&vec![xi; n]), g).unwrap().ln();
            let b = binom2(n) as f64;
            let expected = 0.5 * nf * (PI / xi).ln() + b * (PI / (2.0 * xi)).ln()
                + 0.5 * ((nf - 1.0) / nf).ln()
                - 3.0 * 0.03 * nf / (4.0 * xi * xi);
            assert!((v - expected).abs() < 1e-11, "N = {n}");
        }
    }

    #[test]
    fn weak_coupling_linear_in_g() {
        let s = spectrum(&[0.5, 1.0, 2.5]);
        let slope: f64 = -s.eigenvalues().iter().map(|x| 3.0 / (4.0 * x * x)).sum::<f64>();
        let z = |g: f64| log_z_weak_coupling(&s, Coupling::new(g).unwrap()).unwrap().ln();
        assert!(((z(0.2) - z(0.0)) / 0.2 - slope).abs() < 1e-12);
        let n2 = spectrum(&[1.0, 1.0]);
        let d = log_z_weak_coupling(&n2, Coupling::new(0.01).unwrap()).unwrap().ln()
            - log_z_weak_coupling(&n2, Coupling::FREE).unwrap().ln();
        assert!((d + 2.0 * 3.0 * 0.01 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn epsilon_form_relations() {
        for n in [2usize, 4, 9] {
            let nf = n as f64;
            let eps = vec![0.0; n];
            let xi = 0.8;
            let g = Coupling::new(0.05).unwrap();
            let a = log_z_weak_coupling_epsilon(xi, &eps, g).unwrap().ln();
            let b = log_z_weak_coupling(&spectrum(&vec![xi; n]), g).unwrap().ln();
            assert!((a - b + 0.5 * ((nf - 1.0) / nf).ln()).abs() < 1e-12);
            let free = log_z_free_product(&spectrum(&vec![xi; n])).ln();
            let a0 = log_z_weak_coupling_epsilon(xi, &eps, Coupling::FREE).unwrap().ln();
            assert!((a0 - free).abs() < 1e-12);
            assert!((a - free + 3.0 * 0.05 * nf / (4.0 * xi * xi)).abs() < 1e-12);
        }
    }

    // Oracle: the ε̃-form must approximate the raw form (minus its √((N−1)/N))
    // up to terms of total degree ≥ 5.
    #[test]
    fn epsilon_form_tracks_raw_form() {
        let profile = [1.0, -0.5, 0.3, -0.8, 0.0];
        let n = profile.len() as f64;
        let deltas = [4e-2, 2e-2, 1e-2];
        let gaps: Vec<f64> = deltas
            .iter()
            .map(|d| {
                let eps: Vec<f64> = profile.iter().map(|z| d * z).collect();
                let s = KineticSpectrum::from_epsilons(1.0, &eps).unwrap();
                let raw = log_z_weak_coupling(&s, Coupling::FREE).unwrap().ln() - 0.5 * ((n - 1.0) / n).ln();
                (log_z_weak_coupling_epsilon(1.0, &eps, Coupling::FREE).unwrap().ln() - raw).abs()
            })
            .collect();
        assert!(log_log_slope(&deltas, &gaps) >= 4.5, "{gaps:?}");
    }

    #[test]
    fn weak_epsilon_form_differs_from_free_at_second_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut eps: Vec<f64> = (0..8).map(|_| rng.random_range(-0.05..0.05)).collect();
        let mean = eps.iter().sum::<f64>() / 8.0;
        eps.iter_mut().for_each(|x| *x -= mean);
        let p2: f64 = eps.iter().map(|x| x * x).sum();
        let gap = log_z_free_epsilon_expansion(1.0, &eps, 6).unwrap().ln()
            - log_z_weak_coupling_epsilon(1.0, &eps, Coupling::FREE).unwrap().ln();
        // leading mismatch (N−2)/8·Σε̃²
        assert!((gap / (6.0 / 8.0 * p2) - 1.0).abs() < 0.2, "{gap}");
    }

    #[test]
    fn q0_two_by_two_and_reciprocal_identity() {
        let q = q0_term(&spectrum(&[1.0, 2.0])).unwrap();
        let expected = PI.sqrt() * 0.5 * 1.5f64.sqrt() * (2.0 / 1.5) * (0.5 - 1.0);
        assert_eq!(q.sign(), -1);
        assert!((q.to_f64() - expected).abs() < 1e-14);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for n in 2..=6 {
            let e: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..4.0)).collect();
            let inv: Vec<f64> = e.iter().map(|x| 1.0 / x).collect();
            let lhs = vandermonde(&inv);
            let rhs = reciprocal_vandermonde(&e);
            assert_eq!(lhs.sign(), rhs.sign());
            assert!((lhs.log_mag() - rhs.log_mag()).abs() <= 1e-10 * rhs.log_mag().abs().max(1.0));
        }
        assert!(q0_term(&spectrum(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn q0_scaling_exponent() {
        // e → c·e: √(Σe⁻¹) gives c^{−1/2}, the power gives c^{B}, Δ(1/e) gives c^{−B}.
        let s = spectrum(&[0.7, 1.9, 2.4, 3.3]);
        let c: f64 = 2.5;
        let a = q0_term(&s).unwrap();
        let b = q0_term(&s.scaled(c).unwrap()).unwrap();
        assert_eq!(a.sign(), b.sign());
        let exponent = (b.log_mag() - a.log_mag()) / c.ln();
        assert!((exponent + 0.5).abs() < 1e-12, "{exponent}");
    }

    #[test]
    fn quartic_integral_behaviour() {
        let r = quartic_gaussian_log_integral(2.0, 0.0).unwrap();
        assert_eq!(r.exact, 0.5 * (PI / 2.0).ln());
        let err = |g: f64| {
            let r = quartic_gaussian_log_integral(1.0, g).unwrap();
            (r.exact - r.approximation).abs()
        };
        let ratio = err(0.02) / err(0.005);
        assert!((ratio / 16.0 - 1.0).abs() < 0.3, "{ratio}");
        assert!(err(0.001) < 1e-5);
        let r = quartic_gaussian_log_integral(10.0, 1.0).unwrap();
        assert!((r.exact - r.approximation).abs() <= 1e-3);
        // ∫e^{−λ²−λ⁴} = Σ_k (−1)^k/k! · Γ((2k+1)/4)/2
        let mut series = 0.0;
        let mut log_fact = 0.0;
        for k in 0..80 {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            let term = (crate::numerics::ln_gamma((2 * k + 1) as f64 / 4.0).unwrap() - log_fact).exp();
            series += if k % 2 == 0 { term / 2.0 } else { -term / 2.0 };
        }
        let r = quartic_gaussian_log_integral(1.0, 1.0).unwrap();
        assert!((r.exact - series.ln()).abs() < 1e-8, "{} {}", r.exact, series.ln());
    }

    #[test]
    fn meijer_values() {
        assert_eq!(meijer_factor(2).unwrap().to_f64(), 1.0);
        assert!((meijer_factor(3).unwrap().to_f64() - 4.0).abs() < 1e-12);
        assert!((meijer_factor(4).unwrap().to_f64() - 32.0).abs() < 1e-11);
        assert!(meijer_factor(1).is_err());
    }
}
