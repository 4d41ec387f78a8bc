//! Error type shared across the crate.
//!
//! Five failure classes cover every fallible operation: arguments outside a
//! mathematical domain, work that exceeds a configured memory/scale budget,
//! lookups past the end of a table, integers whose factorization does not
//! match the shape a relation check requires, and invalid run configuration.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request exceeds a configured memory or scale budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Lookup argument beyond the range a table covers.
    #[error("range error: {0}")]
    Range(String),

    /// Integer does not have the factorization shape the check requires.
    #[error("shape error: {0}")]
    Shape(String),

    /// Invalid run configuration or CLI usage.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
