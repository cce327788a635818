use rayon::prelude::*;
use serde::Serialize;

use super::config::{Config, Route};
use super::SCHEMA;
use crate::eigenrep::{log_z_eigen_quadrature, log_z_matrix_mc, MAX_QUADRATURE_N};
use crate::error::{Error, Result};
use crate::factorized::{
    log_z_free_polytope_route, log_z_weak_coupling, log_z_weak_coupling_epsilon, meijer_factor,
};
use crate::free_exact::{log_z_free_epsilon_expansion, log_z_free_product};
use crate::model::{Coupling, KineticSpectrum};
use crate::numerics::SignedLogReal;

/// Inputs a route actually used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub n: usize,
    pub e: Vec<f64>,
    pub xi: f64,
    pub eps_tilde: Vec<f64>,
    pub g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meijer_factor: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RouteResult {
    pub route: Route,
    pub log_z: SignedLogReal,
    pub std_error: f64,
    pub params_echo: ParamsEcho,
}

impl RouteResult {
    /// `ln Z`, or NaN when the route produced a non-positive value.
    pub fn ln(&self) -> f64 {
        if self.log_z.is_positive() {
            self.log_z.log_mag()
        } else {
            f64::NAN
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub a: Route,
    pub b: Route,
    /// `ln Z_a − ln Z_b`
    pub log_diff: f64,
    pub combined_std_error: f64,
    /// Allowed `|log_diff|`.
    pub threshold: f64,
    /// `"deterministic"` or `"mc"`.
    pub kind: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thresholds {
    pub tolerance_log: f64,
    pub mc_sigmas: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub seed: u64,
    pub samples: u64,
    /// Unix seconds; only present when requested, so that reports stay
    /// byte-identical across reruns by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub schema: &'static str,
    pub metadata: Metadata,
    pub thresholds: Thresholds,
    pub results: Vec<RouteResult>,
    /// `pairwise[i][j] = ln Z_i − ln Z_j` in the order of `results`.
    pub pairwise: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Vec<Diagnostic>,
    pub all_pass: bool,
}

fn echo(s: &KineticSpectrum, g: Coupling) -> ParamsEcho {
    let (xi, eps_tilde) = s.epsilons();
    ParamsEcho {
        n: s.n(),
        e: s.eigenvalues().to_vec(),
        xi,
        eps_tilde,
        g: g.value(),
        samples: None,
        seed: None,
        nodes_per_dim: None,
        order: None,
        meijer_factor: None,
    }
}

/// Reject routes that cannot run for this `(N, g)` before doing any work.
pub fn validate_route(route: Route, s: &KineticSpectrum, g: Coupling, config: &Config) -> Result<()> {
    let n = s.n();
    if route.is_free_only() && g.value() != 0.0 {
        return Err(Error::Config(format!(
            "route {} describes the free theory and needs g = 0",
            route.name()
        )));
    }
    match route {
        Route::EigenQuadrature => {
            if n > MAX_QUADRATURE_N {
                return Err(Error::Config(format!(
                    "eigen_quadrature supports N ≤ {MAX_QUADRATURE_N}, got N = {n}"
                )));
            }
            if s.is_degenerate() {
                return Err(Error::Config(
                    "eigen_quadrature needs distinct kinetic eigenvalues".into(),
                ));
            }
        }
        Route::WeakCoupling | Route::WeakCouplingEpsilon if n < 2 => {
            return Err(Error::Config(format!("{} needs N ≥ 2", route.name())));
        }
        Route::FreeExpansion if !(2..=6).contains(&config.expansion_order) => {
            return Err(Error::Config(format!(
                "expansion_order must be in 2..=6, got {}",
                config.expansion_order
            )));
        }
        Route::MatrixMc if config.samples < 2 => {
            return Err(Error::Config("matrix_mc needs at least 2 samples".into()));
        }
        _ => {}
    }
    Ok(())
}

/// Evaluate a single route.
pub fn run_route(route: Route, s: &KineticSpectrum, g: Coupling, config: &Config) -> Result<RouteResult> {
    validate_route(route, s, g, config)?;
    let mut params = echo(s, g);
    let (xi, eps) = (params.xi, params.eps_tilde.clone());
    let mut std_error = 0.0;
    let log_z = match route {
        Route::FreeProduct => log_z_free_product(s),
        Route::FreeExpansion => {
            params.order = Some(config.expansion_order);
            log_z_free_epsilon_expansion(xi, &eps, config.expansion_order)?
        }
        Route::FreePolytope => log_z_free_polytope_route(xi, &eps)?,
        Route::EigenQuadrature => {
            params.nodes_per_dim = Some(config.nodes_per_dim);
            log_z_eigen_quadrature(s, g, config.nodes_per_dim)?
        }
        Route::MatrixMc => {
            params.samples = Some(config.samples);
            params.seed = Some(config.seed);
            let est = log_z_matrix_mc(s, g, config.samples, config.seed)?;
            std_error = est.std_error;
            SignedLogReal::from_ln(est.mean)
        }
        Route::WeakCoupling => {
            params.meijer_factor = Some(config.meijer_factor);
            let z = log_z_weak_coupling(s, g)?;
            if config.meijer_factor {
                z * meijer_factor(s.n())?
            } else {
                z
            }
        }
        Route::WeakCouplingEpsilon => log_z_weak_coupling_epsilon(xi, &eps, g)?,
    };
    Ok(RouteResult {
        route,
        log_z,
        std_error,
        params_echo: params,
    })
}

/// Run every configured route and compare all pairs.
pub fn run_comparison(config: &Config) -> Result<ComparisonReport> {
    if config.routes.len() < 2 {
        return Err(Error::Config("compare needs at least two routes".into()));
    }
    for (i, r) in config.routes.iter().enumerate() {
        if config.routes[..i].contains(r) {
            return Err(Error::Config(format!("route {} listed twice", r.name())));
        }
    }
    if !(config.tolerance_log > 0.0) || !(config.mc_sigmas > 0.0) {
        return Err(Error::Config("tolerances must be positive".into()));
    }
    let s = config.spectrum_spec().resolve()?;
    let g = Coupling::new(config.g).map_err(|e| Error::Config(e.to_string()))?;
    for &r in &config.routes {
        validate_route(r, &s, g, config)?;
    }
    let results: Vec<RouteResult> = config
        .routes
        .par_iter()
        .map(|&r| run_route(r, &s, g, config))
        .collect::<Result<_>>()?;
    Ok(assemble(config, results))
}

pub(crate) fn assemble(config: &Config, results: Vec<RouteResult>) -> ComparisonReport {
    let k = results.len();
    let mut pairwise = vec![vec![0.0; k]; k];
    let mut verdicts = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i != j {
                pairwise[i][j] = results[i].ln() - results[j].ln();
            }
        }
    }
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&results[i], &results[j]);
            let stochastic = a.route.is_stochastic() || b.route.is_stochastic();
            let combined = a.std_error.hypot(b.std_error);
            let threshold = if stochastic {
                // floor at the deterministic tolerance: g = 0 Monte Carlo is exact
                (config.mc_sigmas * combined).max(config.tolerance_log)
            } else {
                config.tolerance_log
            };
            let diff = pairwise[i][j];
            verdicts.push(Verdict {
                a: a.route,
                b: b.route,
                log_diff: diff,
                combined_std_error: combined,
                threshold,
                kind: if stochastic { "mc" } else { "deterministic" },
                pass: diff.abs() <= threshold,
            });
        }
    }
    let mut diagnostics = Vec::new();
    let find = |r: Route| results.iter().find(|x| x.route == r);
    if let (Some(a), Some(b)) = (find(Route::WeakCoupling), find(Route::WeakCouplingEpsilon)) {
        diagnostics.push(Diagnostic {
            name: "log_ratio_weak_coupling_to_epsilon_form",
            value: a.ln() - b.ln(),
        });
    }
    let all_pass = verdicts.iter().all(|v| v.pass);
    ComparisonReport {
        schema: SCHEMA,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            samples: config.samples,
            timestamp: config.timestamp.then(unix_seconds),
        },
        thresholds: Thresholds {
            tolerance_log: config.tolerance_log,
            mc_sigmas: config.mc_sigmas,
        },
        results,
        pairwise,
        verdicts,
        diagnostics,
        all_pass,
    }
}

fn unix_seconds() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> Config {
        Config::from_json(json).unwrap()
    }

    #[test]
    fn free_routes_agree_at_symmetric_point() {
        let c = config(r#"{"xi": 1.5, "n": 5, "routes": ["free_product", "free_expansion", "free_polytope", "weak_coupling_epsilon"]}"#);
        let r = run_comparison(&c).unwrap();
        assert!(r.all_pass, "{:?}", r.verdicts);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(r.pairwise[i][j], -r.pairwise[j][i]);
            }
        }
    }

    #[test]
    fn weak_coupling_ratio_is_reported() {
        let c = config(r#"{"xi": 1.0, "n": 4, "g": 0.1, "routes": ["weak_coupling", "weak_coupling_epsilon"]}"#);
        let r = run_comparison(&c).unwrap();
        assert!(!r.all_pass);
        let d = r.diagnostics[0].value;
        assert!((d - 0.5 * (0.75f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn configuration_errors() {
        let one = config(r#"{"e": [1, 2], "routes": ["free_product"]}"#);
        assert!(matches!(run_comparison(&one), Err(Error::Config(_))));
        let big = config(r#"{"xi": 1, "n": 5, "routes": ["free_product", "eigen_quadrature"]}"#);
        assert!(matches!(run_comparison(&big), Err(Error::Config(_))));
        let coupled = config(r#"{"e": [1, 2], "g": 0.1, "routes": ["free_product", "eigen_quadrature"]}"#);
        assert!(matches!(run_comparison(&coupled), Err(Error::Config(_))));
        let twice = config(r#"{"e": [1, 2], "routes": ["free_product", "free_product"]}"#);
        assert!(matches!(run_comparison(&twice), Err(Error::Config(_))));
    }

    #[test]
    fn meijer_flag_multiplies_weak_route() {
        let mut c = config(r#"{"xi": 1.0, "n": 3, "routes": ["weak_coupling", "free_product"]}"#);
        let s = c.spectrum_spec().resolve().unwrap();
        let off = run_route(Route::WeakCoupling, &s, Coupling::FREE, &c).unwrap();
        c.meijer_factor = true;
        let on = run_route(Route::WeakCoupling, &s, Coupling::FREE, &c).unwrap();
        assert!((on.ln() - off.ln() - 4f64.ln()).abs() < 1e-12);
    }
}
