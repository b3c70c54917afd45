use thiserror::Error;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("F has no real positive roots for beta = {beta} (discriminant {discriminant})")]
    NoRealRoots { beta: f64, discriminant: f64 },

    #[error("beta = {beta} is outside (1/3, 1/2); gamma0 = {gamma0} is not positive")]
    OutsideTheoremRange { beta: f64, gamma0: f64 },

    #[error("bisection for the tail cutoff did not bracket a root on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("profile length {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("profile contains a non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("inhibitor solve did not converge after {iterations} Newton steps (residual {residual:.3e})")]
    InhibitorNotConverged { iterations: usize, residual: f64 },

    #[error("fit window error: {0}")]
    Window(String),

    #[error("input not converged: {0}")]
    NotConverged(String),

    #[error("blow-up detected at t = {time} (|value| = {value:.3e})")]
    BlowUp { time: f64, value: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, PulseError>;
