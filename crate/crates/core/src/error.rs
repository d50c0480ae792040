use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("policy has empty support")]
    EmptySupport,

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e})")]
    NotPsd {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("action set is empty: {0}")]
    InfeasibleDomain(String),

    #[error("action set has {count} actions, more than the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },

    #[error("action set spans no direction")]
    DegenerateSet,

    #[error("point is not in the convex hull (residual {residual:e})")]
    NotInHull { residual: f64 },

    #[error("projection did not converge (residual {residual:e} after {cycles} cycles)")]
    NoConvergence { residual: f64, cycles: usize },

    #[error("learning-rate precondition violated: eta * |X| = {value:.6} > 1 (eta {eta:e})")]
    OmdPreconditionViolated { value: f64, eta: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("at day {t} (scale {k}, interval {l}, meta-day {h}): {source}")]
    AtDay {
        t: u64,
        k: u32,
        l: u64,
        h: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// The innermost error, with any day context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtDay { source, .. } => source.root(),
            other => other,
        }
    }
}
