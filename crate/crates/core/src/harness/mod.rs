//! Route orchestration, cross-comparison and report output.

mod compare;
mod config;
pub mod output;
mod study;

pub use compare::{
    run_comparison, run_route, validate_route, ComparisonReport, Diagnostic, Metadata, ParamsEcho,
    RouteResult, Thresholds, Verdict,
};
pub use config::{Config, Route, SpectrumSpec};
pub use study::{run_polytope_study, Profile, StudyConfig, StudyReport, StudyRow};

/// Version tag at the top of every JSON report.
pub const SCHEMA: &str = "moyal-qmm/1";

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const VERDICT_FAILURE: u8 = 1;
    pub const CONFIG_ERROR: u8 = 2;
}
