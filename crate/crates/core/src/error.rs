use thiserror::Error;

/// Errors raised by the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {}", .0.join("; "))]
    ParamDomain(Vec<String>),

    #[error("degenerate market: mu equals r, so the market price of risk is zero")]
    DegenerateMarket,

    #[error("habit level h = {h} outside (0, {h_max}]")]
    HRange { h: f64, h_max: f64 },

    #[error("dual variable y = {y} below the dual effective region boundary {lower} at h = {h}")]
    OutOfDualRegion { y: f64, lower: f64, h: f64 },

    #[error("state (x = {x}, h = {h}) outside the effective region [{lower}, {upper}]")]
    OutOfEffectiveRegion { x: f64, h: f64, lower: f64, upper: f64 },

    #[error("{what} did not converge: best iterate {best}, residual {residual}")]
    Convergence {
        what: &'static str,
        best: f64,
        residual: f64,
    },

    #[error("{what}: no bracket for target {target} within [{lo}, {hi}]")]
    Bracket {
        what: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("non-finite value while evaluating {what} at h = {h}")]
    NumericOverflow { what: &'static str, h: f64 },

    #[error("{0} is not available for this model variant")]
    Unsupported(&'static str),

    #[error("invalid simulation configuration: {0}")]
    SimConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
