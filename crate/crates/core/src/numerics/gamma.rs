use std::f64::consts::PI;

use super::SignedLogReal;
use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx), and sin(πx) > 0 on (0, 1/2).
        return Ok(PI.ln() - (PI * x).sin().ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

/// Stirling form of Γ(N(N-1)/2) used by the weak-coupling derivation:
/// `2·√(π/(N(N-1)))·(N(N-1)/(2e))^{N(N-1)/2}`, without its `1 + O(N⁻²)`
/// correction.
pub fn stirling_gamma_binom(n: usize) -> Result<SignedLogReal> {
    if n < 2 {
        return Err(Error::Domain(format!("stirling_gamma_binom requires N ≥ 2, got {n}")));
    }
    let nn1 = (n * (n - 1)) as f64;
    let b = nn1 / 2.0;
    let log = 2f64.ln() + 0.5 * (PI / nn1).ln() + b * ((nn1 / 2.0).ln() - 1.0);
    Ok(SignedLogReal::from_ln(log))
}
