//! Model parameters: kinetic spectrum, quartic coupling and the
//! principal-value regulator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap (in units of ξ) below which a spectrum counts as degenerate
/// for routes that divide by Δ(e).
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Kinetic eigenvalues `e_j > 0`, kept sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KineticSpectrum {
    e: Vec<f64>,
}

impl KineticSpectrum {
    pub fn new(mut e: Vec<f64>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::InvalidSpectrum("spectrum is empty".into()));
        }
        if let Some(bad) = e.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "kinetic eigenvalues must be finite and positive, got {bad}"
            )));
        }
        e.sort_by(f64::total_cmp);
        Ok(Self { e })
    }

    /// `e_j = ξ(1 + ε̃_j)`; the deviations must sum to zero.
    pub fn from_epsilons(xi: f64, eps_tilde: &[f64]) -> Result<Self> {
        if !(xi.is_finite() && xi > 0.0) {
            return Err(Error::InvalidSpectrum(format!("ξ must be positive, got {xi}")));
        }
        if eps_tilde.is_empty() {
            return Err(Error::InvalidSpectrum("ε̃ is empty".into()));
        }
        let n = eps_tilde.len() as f64;
        let sum: f64 = eps_tilde.iter().sum();
        if !(sum.abs() <= 1e-10 * n) {
            return Err(Error::InvalidSpectrum(format!(
                "deviations ε̃ must sum to zero, got Σε̃ = {sum:e}"
            )));
        }
        if let Some(bad) = eps_tilde.iter().find(|x| !(1.0 + **x > 0.0)) {
            return Err(Error::InvalidSpectrum(format!(
                "ε̃ = {bad} gives a non-positive eigenvalue"
            )));
        }
        Self::new(eps_tilde.iter().map(|x| xi * (1.0 + x)).collect())
    }

    /// Mean ξ and relative deviations ε̃_j = e_j/ξ − 1.
    pub fn epsilons(&self) -> (f64, Vec<f64>) {
        let xi = self.xi();
        (xi, self.e.iter().map(|x| x / xi - 1.0).collect())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.e
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    pub fn xi(&self) -> f64 {
        self.e.iter().sum::<f64>() / self.n() as f64
    }

    /// Smallest `|e_k − e_l|`; infinite for N = 1.
    pub fn min_gap(&self) -> f64 {
        self.e
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_degenerate(&self) -> bool {
        self.min_gap() < DEGENERACY_THRESHOLD * self.xi()
    }

    /// Error unless all eigenvalues are separated; used by routes that divide
    /// by the Vandermonde determinant of the spectrum.
    pub fn require_distinct(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::DegenerateSpectrum {
                gap: self.min_gap(),
                threshold: DEGENERACY_THRESHOLD * self.xi(),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.e.iter().map(|x| c * x).collect())
    }
}

/// Input document for a spectrum: exactly one of `{"e": [...]}` or
/// `{"xi": x, "eps_tilde": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_tilde: Option<Vec<f64>>,
}

impl SpectrumInput {
    pub fn build(&self) -> Result<KineticSpectrum> {
        match (&self.e, self.xi, &self.eps_tilde) {
            (Some(e), None, None) => KineticSpectrum::new(e.clone()),
            (None, Some(xi), Some(eps)) => KineticSpectrum::from_epsilons(xi, eps),
            _ => Err(Error::Config(
                "spectrum needs exactly one of {\"e\"} or {\"xi\", \"eps_tilde\"}".into(),
            )),
        }
    }

    pub fn from_json(text: &str) -> Result<KineticSpectrum> {
        let input: SpectrumInput = serde_json::from_str(text)?;
        input.build()
    }
}

/// Quartic coupling g ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Coupling(f64);

impl Coupling {
    pub const FREE: Self = Self(0.0);

    pub fn new(g: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("coupling must be finite and ≥ 0, got {g}")));
        }
        Ok(Self(g))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Schwinger / principal-value regulator ε > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PvRegulator(f64);

impl PvRegulator {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Domain(format!("regulator must be positive, got {eps}")));
        }
        Ok(Self(eps))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
