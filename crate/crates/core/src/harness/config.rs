use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::KineticSpectrum;

/// Routes that produce a value of `ln Z[0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    FreeProduct,
    FreeExpansion,
    FreePolytope,
    EigenQuadrature,
    MatrixMc,
    WeakCoupling,
    WeakCouplingEpsilon,
}

impl Route {
    pub const ALL: [Route; 7] = [
        Route::FreeProduct,
        Route::FreeExpansion,
        Route::FreePolytope,
        Route::EigenQuadrature,
        Route::MatrixMc,
        Route::WeakCoupling,
        Route::WeakCouplingEpsilon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::FreeProduct => "free_product",
            Route::FreeExpansion => "free_expansion",
            Route::FreePolytope => "free_polytope",
            Route::EigenQuadrature => "eigen_quadrature",
            Route::MatrixMc => "matrix_mc",
            Route::WeakCoupling => "weak_coupling",
            Route::WeakCouplingEpsilon => "weak_coupling_epsilon",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|r| r.name()).collect();
                Error::Config(format!("unknown route '{s}' (known: {})", known.join(", ")))
            })
    }

    pub fn is_stochastic(self) -> bool {
        self == Route::MatrixMc
    }

    /// Routes that only describe the free theory.
    pub fn is_free_only(self) -> bool {
        matches!(self, Route::FreeProduct | Route::FreeExpansion | Route::FreePolytope)
    }
}

/// One spectrum description: `e`, or `xi` with `eps_tilde`, or `xi` with `n`
/// for the symmetric point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_tilde: Option<Vec<f64>>,
}

impl SpectrumSpec {
    pub fn resolve(&self) -> Result<KineticSpectrum> {
        let s = match (&self.e, self.xi, &self.eps_tilde) {
            (Some(e), None, None) => KineticSpectrum::new(e.clone())?,
            (None, Some(xi), Some(eps)) => KineticSpectrum::from_epsilons(xi, eps)?,
            (None, Some(xi), None) => match self.n {
                Some(n) if n >= 1 => KineticSpectrum::from_epsilons(xi, &vec![0.0; n])?,
                _ => {
                    return Err(Error::Config(
                        "a symmetric spectrum given by xi alone also needs n".into(),
                    ))
                }
            },
            (None, None, None) => {
                return Err(Error::Config(
                    "no spectrum given: use e, or xi with eps_tilde, or xi with n".into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "give the spectrum either as e or as xi (with eps_tilde or n), not both".into(),
                ))
            }
        };
        if let Some(n) = self.n {
            if n != s.n() {
                return Err(Error::Config(format!(
                    "n = {n} does not match the spectrum length {}",
                    s.n()
                )));
            }
        }
        Ok(s)
    }
}

/// Settings for `run_comparison` and the single-route commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_tilde: Option<Vec<f64>>,
    pub g: f64,
    pub routes: Vec<Route>,
    pub samples: u64,
    pub seed: u64,
    pub nodes_per_dim: usize,
    pub expansion_order: usize,
    pub tolerance_log: f64,
    pub mc_sigmas: f64,
    pub meijer_factor: bool,
    pub timestamp: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            n: None,
            e: None,
            xi: None,
            eps_tilde: None,
            g: 0.0,
            routes: Vec::new(),
            samples: 1_000_000,
            seed: 0,
            nodes_per_dim: 80,
            expansion_order: 6,
            tolerance_log: 1e-6,
            mc_sigmas: 3.0,
            meijer_factor: false,
            timestamp: false,
        }
    }
}

impl Config {
    pub fn spectrum_spec(&self) -> SpectrumSpec {
        SpectrumSpec {
            n: self.n,
            e: self.e.clone(),
            xi: self.xi,
            eps_tilde: self.eps_tilde.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
