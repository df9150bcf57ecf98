use thiserror::Error;

pub type Result<T> = std::result::Result<T, WaveError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("boundary value violation: {what} = {value:e} at x = {x}")]
    BoundaryViolation {
        what: &'static str,
        x: f64,
        value: f64,
    },

    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("implicit damping solve failed for u_old = {u_old:e}, c = {coefficient:e}")]
    NonConvergence { u_old: f64, coefficient: f64 },

    #[error(
        "E_p not monotone for p = {p} at t = {t}: {before:e} -> {after:e} (slack {slack:e}); {dump}"
    )]
    Monotonicity {
        p: f64,
        t: f64,
        before: f64,
        after: f64,
        slack: f64,
        dump: String,
    },

    #[error("theta = {value} at (t = {t}, x = {x}) outside [{lower}, {upper}]")]
    ThetaBounds {
        t: f64,
        x: f64,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("window error: {0}")]
    Window(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
