//! Shared error type for the whole crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("function symbol `{0}` is not registered")]
    Unregistered(String),
    #[error("no derivative rule for function symbol `{0}`")]
    NoDerivative(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("root finding failed: {0}")]
    RootFind(String),
    #[error("value {value} outside range of {what}")]
    OutOfRange { what: String, value: f64 },
    #[error("flow validity violated: {0}")]
    Validity(String),
    #[error("trajectory left the domain at lambda = {lambda}: {msg}")]
    DomainExit { lambda: f64, msg: String },
    #[error("Picard iteration did not converge; last sup-change {0:.3e}")]
    PicardDiverged(f64),
    #[error("Newton iteration diverged at time step {step} (residual {residual:.3e})")]
    NewtonDiverged { step: usize, residual: f64 },
    #[error("bracket lies outside the basis span: {0}")]
    OutsideSpan(String),
    #[error("unknown catalog id `{0}`")]
    UnknownCatalogId(String),
    #[error("empty validity domain: {0}")]
    EmptyDomain(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
