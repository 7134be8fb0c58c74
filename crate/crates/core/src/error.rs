use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution is not representable as phase-type: {0}")]
    NotRepresentable(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid system specification: {0}")]
    InvalidSpec(String),

    #[error("scripted arrivals exhausted at t={time} with {in_system} customers still present")]
    IncompleteBusyPeriod { time: f64, in_system: usize },

    #[error("state space exceeds bound of {bound} states")]
    Capacity { bound: usize },

    #[error("linear system is singular or did not converge: {0}")]
    Singular(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("excursion exceeded {cap} steps")]
    Truncated { cap: u64 },

    #[error("configuration error: {0}")]
    Config(String),
}
