use thiserror::Error;

/// Errors produced by the model, equilibrium, simulation and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("`{name}` = {value} lies outside [0, 1]")]
    OutOfUnitInterval { name: &'static str, value: f64 },

    #[error(
        "endemic equilibrium does not exist: effective rate {beta_eff} <= recovery rate {gamma}"
    )]
    NoEndemicEquilibrium { beta_eff: f64, gamma: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("bisection stopped at {x} with residual {residual} above tolerance {tol}")]
    RootTolerance { x: f64, residual: f64, tol: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(&'static str),

    #[error("no equilibrium case matched at mu_s = {mu_s}")]
    NoCaseMatched { mu_s: f64 },

    #[error("equilibrium at mu_s = {mu_s} fails complementarity: {detail}")]
    Complementarity { mu_s: f64, detail: String },

    #[error("state left [0, 1] by {excess:e} at t = {t}; reduce the step size")]
    IntegrationUnstable { t: f64, excess: f64 },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("dimension mismatch: expected {expected} control values, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfUnitInterval { name, value })
    }
}
