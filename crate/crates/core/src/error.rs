use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the admissible parameter domain.
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    /// A formula diverges at the requested parameters.
    #[error("singular limit in {quantity}: {diagnostic}")]
    SingularLimit {
        quantity: &'static str,
        diagnostic: String,
    },

    /// The potential (Helmholtz) split is undefined because both wave speeds coincide.
    #[error("degenerate decomposition: {0}")]
    DegenerateDecomposition(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("no sign change on bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// An iterative method stopped before reaching its tolerance.
    #[error("not converged: {0}")]
    Convergence(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("eigensolver error: {0}")]
    Solver(String),

    #[error("evaluation too close to a pole: {0}")]
    Pole(String),

    /// Heat-trace truncation error exceeds the admissible bound.
    #[error("heat-trace tail bound violated at t = {t:e}; smallest admissible t is {min_t:e}")]
    TailBound { t: f64, min_t: f64 },

    #[error("ill-conditioned fit window: {message}; suggested window [{suggested_lo:e}, {suggested_hi:e}]")]
    Conditioning {
        message: String,
        suggested_lo: f64,
        suggested_hi: f64,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
