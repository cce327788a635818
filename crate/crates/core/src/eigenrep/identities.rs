//! Endpoint identities of the principal-value split and of the
//! exponential-determinant representation of the Vandermonde determinant.

use crate::binom2;
use crate::error::{Error, Result};
use crate::model::PvRegulator;
use crate::numerics::{pairwise_sum, SignedLogReal};

pub const MAX_LIMIT_CHECK_N: usize = 6;

/// `Re[1/(x − iε)] = x/(x² + ε²)`, which tends to `1/x` for `x ≠ 0`.
pub fn pv_kernel_check(x: f64, reg: PvRegulator) -> f64 {
    let eps = reg.value();
    x / (x * x + eps * eps)
}

/// `(iδ)^{−B} det_{j,m}(exp(iδ(m − (N+1)/2)λ_j))` with `B = N(N−1)/2`.
///
/// Centering the frequencies makes the determinant equal to
/// `Π_{j<k} 2i·sin(δ(λ_k − λ_j)/2)`, so the result is real and tends to
/// `Δ(λ)` with relative corrections of order δ². Each permutation term is
/// replaced by its Taylor remainder `Σ_{k≥B} (iθ)^k/k!`; the dropped
/// polynomial part cancels in the alternating sum, which removes the
/// `δ^{−B}` cancellation.
pub fn vandermonde_limit_check(lambda: &[f64], delta: f64) -> Result<SignedLogReal> {
    let n = lambda.len();
    if n == 0 || n > MAX_LIMIT_CHECK_N {
        return Err(Error::UnsupportedSize { n, allowed: "1 ≤ N ≤ 6" });
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    if lambda.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("eigenvalues must be finite".into()));
    }
    let b = binom2(n);
    let centre = (n as f64 + 1.0) / 2.0;
    let mut terms = Vec::new();
    for_each_permutation(n, |perm, sign| {
        let phi: f64 = perm
            .iter()
            .zip(lambda)
            .map(|(&m, l)| (m as f64 + 1.0 - centre) * l)
            .sum();
        terms.push(f64::from(sign) * remainder_over_power(phi, delta, b));
    });
    Ok(SignedLogReal::from_f64(pairwise_sum(&terms)))
}

/// `Re[R_B(iδφ)/(iδ)^B]` where `R_B(z) = Σ_{k≥B} z^k/k!`.
fn remainder_over_power(phi: f64, delta: f64, b: usize) -> f64 {
    let x = delta * phi;
    if x.abs() <= b.max(1) as f64 {
        // φ^B Σ_{k even} (−1)^{k/2} x^k/(k+B)!
        let mut term = phi.powi(b as i32) / factorial(b);
        let mut acc = term;
        let mut k = 0usize;
        loop {
            term *= -x * x / (((b + k + 1) * (b + k + 2)) as f64);
            k += 2;
            acc += term;
            if term.abs() <= 1e-17 * acc.abs() || k > 400 {
                return acc;
            }
        }
    }
    // exp(ix) minus its Taylor polynomial of degree B−1, divided by (iδ)^B.
    let (mut re, mut im) = (x.cos(), x.sin());
    let (mut pr, mut pi) = (1.0, 0.0);
    for k in 0..b {
        re -= pr;
        im -= pi;
        let f = x / (k + 1) as f64;
        (pr, pi) = (-pi * f, pr * f);
    }
    // real part after dividing by i^B
    let q = match b % 4 {
        0 => re,
        1 => im,
        2 => -re,
        _ => -im,
    };
    q / delta.powi(b as i32)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Calls `f(perm, sign)` for every permutation of `0..n` (Heap's algorithm).
fn for_each_permutation<F: FnMut(&[usize], i8)>(n: usize, mut f: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1i8;
    f(&a, sign);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            f(&a, sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenrep::vandermonde;

    #[test]
    fn kernel_examples() {
        let reg = |e| PvRegulator::new(e).unwrap();
        assert!((pv_kernel_check(1.0, reg(1e-6)) - 1.0 / (1.0 + 1e-12)).abs() < 1e-15);
        assert_eq!(pv_kernel_check(0.0, reg(0.3)), 0.0);
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| (pv_kernel_check(0.5, reg(e)) - 2.0).abs())
            .collect();
        assert!((errs[0] / errs[1] - 100.0).abs() < 1.0);
        assert!((errs[1] / errs[2] - 100.0).abs() < 1.0);
    }

    #[test]
    fn permutation_signs() {
        let mut count = 0;
        let mut total = 0i32;
        for_each_permutation(4, |p, s| {
            // sign from inversion count
            let mut inv = 0;
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            assert_eq!(s, if inv % 2 == 0 { 1 } else { -1 });
            count += 1;
            total += i32::from(s);
        });
        assert_eq!((count, total), (24, 0));
    }

    // Closed form of the centred determinant: Π_{j<k} sin(δΔ/2)/(δ/2).
    fn closed_form(lambda: &[f64], delta: f64) -> f64 {
        let mut p = 1.0;
        for j in 0..lambda.len() {
            for k in j + 1..lambda.len() {
                let d = lambda[k] - lambda[j];
                p *= (0.5 * delta * d).sin() / (0.5 * delta);
            }
        }
        p
    }

    #[test]
    fn single_eigenvalue_is_one() {
        for d in [1e-3, 0.5, 10.0] {
            assert_eq!(vandermonde_limit_check(&[0.7], d).unwrap(), SignedLogReal::ONE);
        }
    }

    #[test]
    fn matches_sine_product_on_both_branches() {
        let lambda = [0.3, -1.1, 0.8, 2.0];
        for delta in [1e-4, 1e-2, 0.3, 2.5] {
            let v = vandermonde_limit_check(&lambda, delta).unwrap().to_f64();
            let c = closed_form(&lambda, delta);
            assert!((v - c).abs() <= 1e-9 * c.abs().max(1e-3), "δ = {delta}: {v} vs {c}");
        }
    }

    #[test]
    fn two_point_ratio_converges_quadratically() {
        let lambda = [0.0, 1.0];
        let delta_v = vandermonde(&lambda).to_f64();
        let ratio = |d: f64| vandermonde_limit_check(&lambda, d).unwrap().to_f64() / delta_v;
        let d1 = (ratio(1e-2) - ratio(5e-3)).abs();
        let d2 = (ratio(5e-3) - ratio(2.5e-3)).abs();
        assert!((d1 / d2 - 4.0).abs() < 0.05, "{}", d1 / d2);
        assert!((ratio(1e-4) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_large_n_and_bad_delta() {
        assert!(vandermonde_limit_check(&[0.0; 7], 0.1).is_err());
        assert!(vandermonde_limit_check(&[0.0, 1.0], 0.0).is_err());
    }
}
