use std::ops::Deref;

use crate::error::{Error, Result};
use crate::numerics::SignedLogReal;

/// Integration variables λ_1..λ_N of the eigenvalue integral.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueVector(Vec<f64>);

impl EigenvalueVector {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("eigenvalues must be finite".into()));
        }
        Ok(Self(lambda))
    }
}

impl Deref for EigenvalueVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `Δ(λ) = Π_{k<l} (λ_l − λ_k)` with exact sign tracking; the zero element
/// when two entries coincide.
pub fn vandermonde(lambda: &[f64]) -> SignedLogReal {
    let mut sign = 1i8;
    let mut log = 0.0;
    for (k, &lk) in lambda.iter().enumerate() {
        for &ll in &lambda[k + 1..] {
            let d = ll - lk;
            if d == 0.0 {
                return SignedLogReal::ZERO;
            }
            if d < 0.0 {
                sign = -sign;
            }
            log += d.abs().ln();
        }
    }
    SignedLogReal::new(sign, log)
}

/// `Π_{k<l} (λ_l − λ_k)/(λ_l + λ_k)`, which equals `Δ(λ)²/Δ(λ²)` wherever
/// both sides are defined.
pub fn vandermonde_ratio(lambda: &[f64]) -> Result<SignedLogReal> {
    let scale = lambda.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut acc = SignedLogReal::ONE;
    for (k, &lk) in lambda.iter().enumerate() {
        for &ll in &lambda[k + 1..] {
            let den = ll + lk;
            if den.abs() < 1e-14 * scale || den == 0.0 {
                return Err(Error::Pole(den.abs()));
            }
            acc = acc * SignedLogReal::from_f64(ll - lk) / SignedLogReal::from_f64(den);
        }
    }
    Ok(acc)
}
