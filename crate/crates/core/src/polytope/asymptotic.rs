use std::f64::consts::{E, PI};

use super::{fiber_dimension, DiagonalMarginal, PolytopeVolume, VolumeMethod};
use crate::binom2;
use crate::error::{Error, Result};
use crate::numerics::SignedLogReal;

fn check(u: &DiagonalMarginal) -> Result<(f64, f64)> {
    let n = u.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, allowed: "N ≥ 2" });
    }
    let s = u.s();
    if !(s > 0.0) {
        return Err(Error::Domain("asymptotic volume needs S > 0".into()));
    }
    Ok((n as f64, s))
}

/// Large-N fiber volume
///
/// ```text
/// √2 e^{7/6} (eS/(N(N−1)))^{N(N−1)/2} (N(N−1)²/(2πS²))^{N/2}
///   · exp[−(N−1)²(N+2)/(2S²) Σd²] · exp[N(N−1)³/(3S³) Σd³]
///   · exp[−N(N−1)⁴/(4S⁴) Σd⁴] · exp[(N−1)⁴/(4S⁴) (Σd²)²]
/// ```
///
/// with `d_j = u_j − S/N`. Applicability is reported by
/// [`validity_condition`], not enforced.
pub fn asymptotic_volume(u: &DiagonalMarginal) -> Result<PolytopeVolume> {
    let (nf, s) = check(u)?;
    let b = binom2(u.n()) as f64;
    let mean = s / nf;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in u.u() {
        let d = x - mean;
        s2 += d * d;
        s3 += d * d * d;
        s4 += d * d * d * d;
    }
    let m1 = nf - 1.0;
    let log = 0.5 * 2f64.ln()
        + 7.0 / 6.0
        + b * (E * s / (nf * m1)).ln()
        + 0.5 * nf * (nf * m1 * m1 / (2.0 * PI * s * s)).ln()
        - m1.powi(2) * (nf + 2.0) / (2.0 * s * s) * s2
        + nf * m1.powi(3) / (3.0 * s.powi(3)) * s3
        - nf * m1.powi(4) / (4.0 * s.powi(4)) * s4
        + m1.powi(4) / (4.0 * s.powi(4)) * s2 * s2;
    Ok(PolytopeVolume {
        value: SignedLogReal::from_ln(log),
        method: VolumeMethod::Asymptotic,
        std_error: 0.0,
        dimension: fiber_dimension(u.n()),
    })
}

/// `max_j N^{1/4} (N−1)/S |u_j − S/N|`; the asymptotic volume needs this ≪ 1.
pub fn validity_condition(u: &DiagonalMarginal) -> Result<f64> {
    let (nf, s) = check(u)?;
    let mean = s / nf;
    let dev = u.u().iter().fold(0.0f64, |m, x| m.max((x - mean).abs()));
    Ok(nf.powf(0.25) * (nf - 1.0) / s * dev)
}
