use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A distribution over posteriors does not average to the prior.
    #[error("distribution is not inducible: {0}")]
    Inducibility(String),

    #[error("invalid game specification:\n  {}", .0.join("\n  "))]
    InvalidSpec(Vec<String>),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A numerical invariant failed. Please report it with the input.
    #[error("internal error: {0}")]
    Internal(String),
}
