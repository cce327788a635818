use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("degenerate spectrum: smallest eigenvalue gap {gap:e} is below {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("matrix size N = {n} is not supported here (allowed: {allowed})")]
    UnsupportedSize { n: usize, allowed: &'static str },

    #[error("pole: |λ_k + λ_l| = {0:e} is numerically zero")]
    Pole(f64),

    #[error("marginal is infeasible: 2·max(u) = {twice_max} exceeds S = {sum}")]
    Infeasible { twice_max: f64, sum: f64 },

    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
