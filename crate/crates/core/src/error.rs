use thiserror::Error;

/// Errors raised by the spectral algebra, the solvers and the verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MajorantError {
    #[error("order j = {j} is not admissible here (need j >= {min})")]
    InvalidOrder { j: u32, min: u32 },

    #[error("exponent p = {p} is outside the admissible range")]
    InvalidExponent { p: f64 },

    #[error("input has no nonzero coefficient")]
    EmptyInput,

    #[error("quadrature did not reach rel_tol after {grid} points (last relative change {change:e}, best estimate {estimate})")]
    NonConvergence {
        grid: usize,
        change: f64,
        estimate: f64,
    },

    #[error("slackness identity failed: sum F*G = {lhs}, ||G||^2j = {rhs}")]
    ScalingMismatch { lhs: f64, rhs: f64 },

    #[error("enumeration needs {count} multisets, limit is {limit}")]
    EnumerationBudgetExceeded { count: u128, limit: u128 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("solvers disagree: max coefficient discrepancy {max_discrepancy:e}")]
    Mismatch { max_discrepancy: f64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, MajorantError>;
