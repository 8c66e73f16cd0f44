use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("customer {customer}: window-start interval [{lo}, {hi}] is empty")]
    InfeasibleInterval { customer: usize, lo: f64, hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no speed profile within bounds satisfies the time windows: {0}")]
    SpeedInfeasible(String),

    #[error("route rejected: {0}")]
    InfeasibleRoute(String),

    #[error("no admissible perturbation after {0} attempts")]
    PerturbationExhausted(usize),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
