use thiserror::Error;

/// Errors raised while constructing or verifying pseudo-boson objects.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation dimension {dim}: {reason}")]
    Dimension { dim: usize, reason: String },

    #[error("parameter {name} = {value} outside its domain {domain}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("ladder construction failed: {0}")]
    Construction(String),

    #[error("truncation insufficient at dim {dim}: tail mass {tail:e} >= {tol:e} (increase dim)")]
    TruncationInsufficient { dim: usize, tail: f64, tol: f64 },

    #[error("degenerate pairing: |<psi_0|phi_0>| = {overlap:e}")]
    DegeneratePairing { overlap: f64 },

    #[error("bi-orthonormality degraded to {residual:e} at (n, m) = ({n}, {m})")]
    NumericalDegradation { residual: f64, n: usize, m: usize },

    #[error("n_max = {n_max} too small for |alpha|^2 = {abs2}: series tail {tail:e}")]
    NmaxInsufficient { n_max: usize, abs2: f64, tail: f64 },

    #[error("quadrature order {order} insufficient: {reason}")]
    QuadratureOrder { order: usize, reason: String },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("non-finite values produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
