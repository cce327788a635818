//! Diagonal subpolytopes of symmetric stochastic matrices.
//!
//! For a symmetric zero-diagonal matrix `w ≥ 0` with row sums `u`, the fiber
//! `{w : A·w = u}` is a polytope of dimension `N(N−3)/2`. Its volume `V_N(u)`
//! is measured in a fixed coordinate chart (see [`Chart`]) chosen so that
//!
//! ```text
//! ∫ Π_{k<l} dw_kl f(A·w) = ½ ∫ dᴺu V_N(u) f(u).
//! ```

mod asymptotic;
mod chart;
mod exact;
mod identity;
mod mc;

use serde::{Deserialize, Serialize};

use crate::binom2;
use crate::error::{Error, Result};
use crate::numerics::SignedLogReal;

pub use asymptotic::{asymptotic_volume, validity_condition};
pub use chart::Chart;
pub use exact::{exact_volume_n3, exact_volume_small_n};
pub use identity::factorization_identity_check;
pub use mc::{mc_volume, FOURIER_MIN_N};

/// Row sums `u` of the off-diagonal part; `h = 1 − u` is the diagonal of the
/// corresponding symmetric stochastic matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalMarginal {
    u: Vec<f64>,
}

impl DiagonalMarginal {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Domain("marginal is empty".into()));
        }
        if let Some(bad) = u.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!("row sums must be finite and ≥ 0, got {bad}")));
        }
        Ok(Self { u })
    }

    /// `u_j = S/N` for all j.
    pub fn symmetric(n: usize, s: f64) -> Result<Self> {
        Self::new(vec![s / n as f64; n])
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn s(&self) -> f64 {
        self.u.iter().sum()
    }

    pub fn h(&self) -> Vec<f64> {
        self.u.iter().map(|x| 1.0 - x).collect()
    }

    pub fn chi(&self) -> f64 {
        self.n() as f64 - self.s()
    }

    /// Nonempty fiber iff `2·max u ≤ S`.
    pub fn is_feasible(&self) -> bool {
        2.0 * self.max() <= self.s() * (1.0 + 1e-12)
    }

    pub fn require_feasible(&self) -> Result<()> {
        if !self.is_feasible() {
            return Err(Error::Infeasible {
                twice_max: 2.0 * self.max(),
                sum: self.s(),
            });
        }
        Ok(())
    }

    /// Some `u_j > 1`, so `h_j < 0` and the stochastic-matrix reading is lost.
    pub fn is_extrapolated(&self) -> bool {
        self.u.iter().any(|&x| x > 1.0)
    }

    pub fn scaled(&self, m: f64) -> Result<Self> {
        Self::new(self.u.iter().map(|x| m * x).collect())
    }

    /// `Σ_j N^{k/4 − 1} ((N−1)/S)^k |u_j − S/N|^k` for k = 2, 3, 4. All three
    /// must tend to zero with N for the asymptotic volume to apply.
    pub fn moment_diagnostics(&self) -> [f64; 3] {
        let n = self.n() as f64;
        let s = self.s();
        let mean = s / n;
        let mut out = [0.0; 3];
        for (i, k) in (2..=4).enumerate() {
            let kf = f64::from(k);
            let sum: f64 = self
                .u
                .iter()
                .map(|x| ((n - 1.0) / s * (x - mean).abs()).powi(k))
                .sum();
            out[i] = n.powf(kf / 4.0 - 1.0) * sum;
        }
        out
    }

    fn max(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }
}

/// Off-diagonal entries `w_kl`, k < l, in the order `(0,1), (0,2), …, (1,2), …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OffDiagonalMatrix {
    w: Vec<f64>,
}

impl OffDiagonalMatrix {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::Domain(format!("entries must be finite and ≥ 0, got {bad}")));
        }
        Ok(Self { w })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }
}

/// Pairs `(k, l)`, k < l, in storage order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(binom2(n));
    for k in 0..n {
        for l in k + 1..n {
            out.push((k, l));
        }
    }
    out
}

/// `u_k = Σ_{j≠k} w_{jk}`.
pub fn row_sums(w: &OffDiagonalMatrix, n: usize) -> Result<DiagonalMarginal> {
    if w.w.len() != binom2(n) {
        return Err(Error::Domain(format!(
            "expected N(N-1)/2 = {} entries, got {}",
            binom2(n),
            w.w.len()
        )));
    }
    let mut u = vec![0.0; n];
    for (&x, (k, l)) in w.w.iter().zip(pairs(n)) {
        u[k] += x;
        u[l] += x;
    }
    DiagonalMarginal::new(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    Exact,
    Mc,
    Asymptotic,
}

/// Fiber volume. For Monte Carlo results `std_error` is the standard error of
/// `ln value`; it is zero otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolytopeVolume {
    pub value: SignedLogReal,
    pub method: VolumeMethod,
    pub std_error: f64,
    pub dimension: usize,
}

impl PolytopeVolume {
    pub fn log_volume(&self) -> f64 {
        if self.value.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.value.log_mag()
        }
    }
}

/// `N(N−3)/2`, the fiber dimension (zero for N ≤ 3).
pub fn fiber_dimension(n: usize) -> usize {
    binom2(n).saturating_sub(n)
}

/// Flat export record for a volume evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeRecord {
    pub n: usize,
    pub u: Vec<f64>,
    pub method: VolumeMethod,
    /// `null` when the volume is zero.
    pub log_volume: Option<f64>,
    pub std_error: f64,
    pub validity: f64,
}

impl VolumeRecord {
    pub fn new(u: &DiagonalMarginal, v: &PolytopeVolume) -> Self {
        let lv = v.log_volume();
        Self {
            n: u.n(),
            u: u.u().to_vec(),
            method: v.method,
            log_volume: lv.is_finite().then_some(lv),
            std_error: v.std_error,
            validity: validity_condition(u).unwrap_or(f64::NAN),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_sum_examples() {
        let u = row_sums(&OffDiagonalMatrix::new(vec![0.5; 3]).unwrap(), 3).unwrap();
        assert_eq!(u.u(), &[1.0, 1.0, 1.0]);
        let u = row_sums(&OffDiagonalMatrix::new(vec![0.0; 6]).unwrap(), 4).unwrap();
        assert_eq!(u.u(), &[0.0; 4]);
        let mut w = vec![0.0; 6];
        w[0] = 1.0;
        let u = row_sums(&OffDiagonalMatrix::new(w).unwrap(), 4).unwrap();
        assert_eq!(u.u(), &[1.0, 1.0, 0.0, 0.0]);
        assert!(row_sums(&OffDiagonalMatrix::new(vec![0.0; 5]).unwrap(), 4).is_err());
    }

    #[test]
    fn marginal_derived_quantities() {
        let m = DiagonalMarginal::new(vec![0.4, 0.5, 0.7]).unwrap();
        assert!((m.s() - 1.6).abs() < 1e-15);
        assert!((m.chi() - 1.4).abs() < 1e-15);
        assert!(m.is_feasible());
        assert!(!DiagonalMarginal::new(vec![1.0, 1.0, 3.0]).unwrap().is_feasible());
        assert!(DiagonalMarginal::new(vec![2.0, 1.0, 1.0]).unwrap().is_feasible());
        assert!(DiagonalMarginal::new(vec![-0.1, 1.0]).is_err());
        assert_eq!(DiagonalMarginal::symmetric(4, 2.0).unwrap().moment_diagnostics(), [0.0; 3]);
        assert_eq!(fiber_dimension(4), 2);
        assert_eq!(fiber_dimension(3), 0);
    }
}
