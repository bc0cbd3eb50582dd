use thiserror::Error;

/// Errors raised by samplers, inversion routines and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("requested zero draws")]
    ZeroCount,

    #[error("operation not supported for {0}")]
    Unsupported(String),

    #[error("law {0} has infinite variance")]
    InfiniteVariance(String),

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("cdf grid needed a monotonicity repair of {repair:e}, budget is {budget:e}")]
    RepairBudgetExceeded { repair: f64, budget: f64 },

    #[error("tail mass {tail_mass:e} still above {target:e} at {sigmas} standard deviations")]
    TailMassUnreachable { tail_mass: f64, target: f64, sigmas: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
