use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SCHEMA;
use crate::binom2;
use crate::error::{Error, Result};
use crate::polytope::{
    asymptotic_volume, exact_volume_n3, exact_volume_small_n, mc_volume, validity_condition,
    DiagonalMarginal,
};

/// Marginal profile, instantiated for each N of the study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `u_j = mean`.
    Symmetric { mean: f64 },
    /// `u_j = mean·(1 ± amplitude)` alternating; the last entry stays at the
    /// mean for odd N.
    Alternating { mean: f64, amplitude: f64 },
    /// Fixed vector, used only for the matching N.
    Explicit { u: Vec<f64> },
}

impl Profile {
    fn name(&self) -> String {
        match self {
            Profile::Symmetric { mean } => format!("symmetric(mean={mean})"),
            Profile::Alternating { mean, amplitude } => {
                format!("alternating(mean={mean},amplitude={amplitude})")
            }
            Profile::Explicit { .. } => "explicit".into(),
        }
    }

    fn instantiate(&self, n: usize) -> Option<Vec<f64>> {
        match self {
            Profile::Symmetric { mean } => Some(vec![*mean; n]),
            Profile::Alternating { mean, amplitude } => Some(
                (0..n)
                    .map(|j| {
                        if n % 2 == 1 && j == n - 1 {
                            *mean
                        } else if j % 2 == 0 {
                            mean * (1.0 + amplitude)
                        } else {
                            mean * (1.0 - amplitude)
                        }
                    })
                    .collect(),
            ),
            Profile::Explicit { u } => (u.len() == n).then(|| u.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub n_values: Vec<usize>,
    pub profiles: Vec<Profile>,
    pub samples: u64,
    pub seed: u64,
    /// Per-coordinate log-gap threshold for the asymptotic volume.
    pub per_coordinate_tolerance: f64,
    /// Smallest N at which the asymptotic gap is judged.
    pub asymptotic_min_n: usize,
    pub mc_sigmas: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_values: vec![4, 5, 8, 12, 16, 20],
            profiles: vec![Profile::Symmetric { mean: 1.0 }],
            samples: 1_000_000,
            seed: 0,
            per_coordinate_tolerance: 0.02,
            asymptotic_min_n: 8,
            mc_sigmas: 3.0,
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid study config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub profile: String,
    pub u: Vec<f64>,
    pub feasible: bool,
    /// Some `u_j > 1`: outside the stochastic-matrix reading.
    pub extrapolated: bool,
    pub validity: f64,
    /// Moment sums for k = 2, 3, 4.
    pub moments: [f64; 3],
    pub log_exact: Option<f64>,
    pub log_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub log_asymptotic: Option<f64>,
    /// `(ln V_asym − ln V_ref)/(N(N−1)/2)` with the exact volume as
    /// reference when available, the Monte Carlo volume otherwise.
    pub per_coordinate_gap: Option<f64>,
    pub exact_vs_mc_pass: Option<bool>,
    pub asymptotic_pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyReport {
    pub schema: &'static str,
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
    pub all_pass: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn study_row(n: usize, profile: &Profile, u: Vec<f64>, c: &StudyConfig) -> Result<StudyRow> {
    let m = DiagonalMarginal::new(u).map_err(|e| Error::Config(e.to_string()))?;
    let feasible = m.is_feasible();
    let mut row = StudyRow {
        n,
        profile: profile.name(),
        u: m.u().to_vec(),
        feasible,
        extrapolated: m.is_extrapolated(),
        validity: validity_condition(&m).unwrap_or(f64::NAN),
        moments: m.moment_diagnostics(),
        log_exact: None,
        log_mc: None,
        mc_std_error: None,
        log_asymptotic: None,
        per_coordinate_gap: None,
        exact_vs_mc_pass: None,
        asymptotic_pass: None,
    };
    if !feasible {
        return Ok(row);
    }
    let exact = match n {
        3 => Some(exact_volume_n3(&m)?),
        4 | 5 => Some(exact_volume_small_n(&m)?),
        _ => None,
    };
    row.log_exact = exact.map(|v| v.log_volume()).and_then(finite);
    if n >= 4 {
        let v = mc_volume(&m, c.samples, c.seed)?;
        row.log_mc = finite(v.log_volume());
        row.mc_std_error = Some(v.std_error);
    }
    row.log_asymptotic = asymptotic_volume(&m).ok().map(|v| v.log_volume());
    if let (Some(x), Some(y), Some(se)) = (row.log_exact, row.log_mc, row.mc_std_error) {
        row.exact_vs_mc_pass = Some((x - y).abs() <= c.mc_sigmas * se);
    }
    let reference = row.log_exact.or(row.log_mc);
    if let (Some(a), Some(r)) = (row.log_asymptotic, reference) {
        let b = binom2(n) as f64;
        let gap = (a - r) / b;
        row.per_coordinate_gap = Some(gap);
        if n >= c.asymptotic_min_n {
            row.asymptotic_pass = Some(gap.abs() <= c.per_coordinate_tolerance);
        }
    }
    Ok(row)
}

/// Tabulate exact, Monte Carlo and asymptotic volumes over the configured
/// N values and profiles.
pub fn run_polytope_study(c: &StudyConfig) -> Result<StudyReport> {
    if c.n_values.is_empty() || c.profiles.is_empty() {
        return Err(Error::Config("study needs n_values and profiles".into()));
    }
    if let Some(&bad) = c.n_values.iter().find(|&&n| n < 3) {
        return Err(Error::Config(format!("study needs N ≥ 3, got {bad}")));
    }
    let mut rows = Vec::new();
    for &n in &c.n_values {
        for p in &c.profiles {
            if let Some(u) = p.instantiate(n) {
                rows.push(study_row(n, p, u, c)?);
            }
        }
    }
    let all_pass = rows
        .iter()
        .all(|r| r.exact_vs_mc_pass.unwrap_or(true) && r.asymptotic_pass.unwrap_or(true));
    Ok(StudyReport {
        schema: SCHEMA,
        config: c.clone(),
        rows,
        all_pass,
    })
}
