//! JSON and CSV rendering of reports.

use serde::Serialize;

use super::compare::{ComparisonReport, RouteResult};
use super::study::StudyReport;
use crate::error::{Error, Result};
use crate::polytope::VolumeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format '{other}' (json or csv)"))),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// Flat pairwise table, one row per verdict.
pub fn comparison_csv(r: &ComparisonReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "route_a",
        "route_b",
        "log_z_a",
        "log_z_b",
        "log_diff",
        "combined_std_error",
        "threshold",
        "kind",
        "pass",
    ])?;
    for v in &r.verdicts {
        let za = r.results.iter().find(|x| x.route == v.a).map(RouteResult::ln);
        let zb = r.results.iter().find(|x| x.route == v.b).map(RouteResult::ln);
        w.write_record([
            v.a.name().to_string(),
            v.b.name().to_string(),
            opt(za),
            opt(zb),
            format!("{:e}", v.log_diff),
            format!("{:e}", v.combined_std_error),
            format!("{:e}", v.threshold),
            v.kind.to_string(),
            v.pass.to_string(),
        ])?;
    }
    finish(w)
}

pub fn routes_csv(results: &[RouteResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["route", "n", "g", "log_z", "std_error"])?;
    for r in results {
        w.write_record([
            r.route.name().to_string(),
            r.params_echo.n.to_string(),
            format!("{:e}", r.params_echo.g),
            format!("{:e}", r.ln()),
            format!("{:e}", r.std_error),
        ])?;
    }
    finish(w)
}

fn join(u: &[f64]) -> String {
    u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

pub fn volumes_csv(records: &[VolumeRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "u", "method", "log_volume", "std_error", "validity"])?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            join(&r.u),
            serde_json::to_value(r.method)?.as_str().unwrap_or_default().to_string(),
            opt(r.log_volume),
            format!("{:e}", r.std_error),
            format!("{:e}", r.validity),
        ])?;
    }
    finish(w)
}

pub fn study_csv(r: &StudyReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "profile",
        "feasible",
        "extrapolated",
        "validity",
        "log_exact",
        "log_mc",
        "mc_std_error",
        "log_asymptotic",
        "per_coordinate_gap",
        "exact_vs_mc_pass",
        "asymptotic_pass",
    ])?;
    let flag = |b: Option<bool>| b.map(|x| x.to_string()).unwrap_or_default();
    for row in &r.rows {
        w.write_record([
            row.n.to_string(),
            row.profile.clone(),
            row.feasible.to_string(),
            row.extrapolated.to_string(),
            format!("{:e}", row.validity),
            opt(row.log_exact),
            opt(row.log_mc),
            opt(row.mc_std_error),
            opt(row.log_asymptotic),
            opt(row.per_coordinate_gap),
            flag(row.exact_vs_mc_pass),
            flag(row.asymptotic_pass),
        ])?;
    }
    finish(w)
}
