use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quantum number out of range: {0}")]
    QuantumNumber(String),

    #[error("enumeration bound exceeded: {states} states > {max}")]
    EnumerationBound { states: u128, max: u128 },

    #[error("term budget exceeded: {terms} terms > {max}")]
    TermBudget { terms: u64, max: u64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error} > target {target}")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        target: f64,
    },

    #[error("expectation value diverges: tail keeps growing (last extension changed the value by {rel_change:.3e})")]
    DivergentExpectation { rel_change: f64 },

    #[error("root finder did not converge: {0}")]
    RootFind(String),

    #[error("closed form not available for 2S = {two_s}; supported 2S: {supported}")]
    UnsupportedSpin { two_s: i64, supported: &'static str },

    #[error("per-site factor crossed zero at t = {t}; log-domain power is undefined there")]
    FactorZeroCrossing { t: f64 },

    #[error("time grid invalid: {0}")]
    Grid(String),

    #[error("initial density matrix invalid: {0}")]
    DensityMatrix(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("plot error: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
