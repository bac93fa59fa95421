use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("syntax error at byte {offset}: expected one of {expected:?}")]
    Syntax { offset: usize, expected: Vec<String> },

    #[error("log depth {depth} is outside the supported range 1..=4")]
    Depth { depth: u32 },

    #[error("format error: {0}")]
    Format(String),

    #[error("sample abscissae are not strictly increasing at row {row}")]
    Monotonicity { row: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),

    #[error("integration step failure at x = {x:e}: {reason}")]
    StepFailure { x: f64, reason: String },

    #[error("coefficient error at x = {x:e}: {reason}")]
    Coefficient { x: f64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigenvalue bisection did not converge: {0}")]
    Convergence(String),

    #[error("boundary-value fit rejected: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
