use alloc::string::String;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid game spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("policy class mismatch: policy is {policy}, check requested {requested}")]
    ClassMismatch {
        policy: &'static str,
        requested: &'static str,
    },
    #[error("transition kernel is not strictly positive at {0}")]
    KernelNotPositive(String),
    #[error("no terminal payoff supplied for stopped prefix {0}")]
    MissingPayoff(String),
    #[error("{what} cap exceeded: {required} candidates needed, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },
    #[error("CFL condition violated: time step {step} exceeds limit {limit}")]
    Cfl { step: f64, limit: f64 },
    #[error("numerical instability: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;
