use thiserror::Error;

use crate::index::IndexPair;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integration diverged at t = {t}: {reason}")]
    IntegrationDiverged { t: f64, reason: String },

    #[error("index pair did not stabilize up to m = {m}: {coarse:?} vs {fine:?}")]
    Unstable {
        m: usize,
        coarse: IndexPair,
        fine: IndexPair,
    },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("model rejected: {reason} (witness t = {t}, z = {z:?}, H = {value})")]
    NegativeModel {
        reason: String,
        t: f64,
        z: Vec<f64>,
        value: f64,
    },

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
