use thiserror::Error;

/// Crate-wide error type.
///
/// Variants mirror the failure modes of the individual layers: evaluation
/// outside a field's domain, exhausting the derivative-order budget, index
/// bookkeeping mistakes, degenerate metrics, and quadrature/fit breakdowns.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("derivative order budget exceeded: {0}")]
    Order(String),
    #[error("tensor slot mismatch: {0}")]
    Slot(String),
    #[error("singular or non positive-definite metric: {0}")]
    SingularMetric(String),
    #[error("two-form is not closed (Bianchi residual {0:e})")]
    NotClosed(f64),
    #[error("curvature norm vanishes at evaluation point")]
    ZeroCurvature,
    #[error("refinement tolerance exceeded: {0}")]
    Tolerance(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
