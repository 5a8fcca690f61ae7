use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants split into two families: input/validation problems (the caller
/// asked for something outside a domain) and numerical problems (a limit,
/// root or sum failed to settle). The CLI maps them to exit codes 2 and 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {arg} = {value} is outside the domain of {function}: {reason}")]
    Domain {
        function: &'static str,
        arg: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBc(String),

    #[error("operation not supported by this model: {0}")]
    Unsupported(String),

    #[error(
        "extension is not regular: the log-channel coefficient a⁻₀ is not forced to vanish, \
         so ln D(−t) carries (ln t)^{l0} terms with l0 = {l0} and no finite Γ exists"
    )]
    NonRegular { l0: u32 },

    #[error("path from 0 to {z} passes through branch point {branch_point}")]
    BranchPoint { z: String, branch_point: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no convergence in {what}: {detail}")]
    Convergence { what: &'static str, detail: String },

    #[error("eigenvalue truncation insufficient: tail bound {tail_bound:e} exceeds {limit:e}")]
    InsufficientTruncation { tail_bound: f64, limit: f64 },

    #[error("root count anomaly in {interval}: expected {expected}, found {found}")]
    RootCountAnomaly {
        interval: String,
        expected: usize,
        found: usize,
    },

    #[error("degenerate leading coefficient at exponent {exponent}: terms cancel")]
    DegenerateLeading { exponent: f64 },

    #[error("{0} is too close to an eigenvalue")]
    NearEigenvalue(f64),
}

impl Error {
    /// True for errors caused by invalid input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::DimensionMismatch(_)
                | Error::InvalidBc(_)
                | Error::Unsupported(_)
                | Error::NonRegular { .. }
                | Error::BranchPoint { .. }
                | Error::Config(_)
                | Error::Pole { .. }
                | Error::NearEigenvalue(_)
        )
    }

    pub(crate) fn domain(
        function: &'static str,
        arg: &'static str,
        value: f64,
        reason: &'static str,
    ) -> Self {
        Error::Domain {
            function,
            arg,
            value,
            reason,
        }
    }

    pub(crate) fn convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
