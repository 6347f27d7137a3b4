use num_complex::Complex64;
use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite input in {0}")]
    NonFiniteInput(&'static str),

    #[error("singular point at z = {at}")]
    SingularPoint { at: Complex64 },

    #[error("singular point hit at backward depth {depth}")]
    SingularHit { depth: usize },

    #[error("pair violates the orbit relation (relative residual {residual:.3e})")]
    InconsistentPair { residual: f64 },

    #[error("seed search failed: {0}")]
    SeedFailure(String),

    #[error("hyperbolicity certificate failed (kappa = {kappa:.6})")]
    HyperbolicityUnverified { kappa: f64 },

    #[error("pressure root not bracketed on [{lo}, {hi}]: P(lo) = {p_lo:.3e}, P(hi) = {p_hi:.3e}")]
    BracketFailure { lo: f64, hi: f64, p_lo: f64, p_hi: f64 },

    #[error("numeric failure in {what} (residual {residual:.3e})")]
    NumericFailure { what: String, residual: f64 },

    #[error("requested size {requested} exceeds cap {cap}")]
    CapExceeded { requested: u64, cap: u64 },

    #[error("box-count fit refused: r^2 = {r_squared:.6} below 0.99")]
    FitRejected { r_squared: f64 },

    #[error("complex literal: {0}")]
    ParseComplex(#[from] ParseComplexError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input file: {0}")]
    Format(String),
}

/// Parse error for the `a+bi` complex literal form.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseComplexError {
    #[error("empty literal")]
    Empty,
    #[error("malformed complex literal {0:?}")]
    Malformed(String),
    #[error("non-finite component in {0:?}")]
    NonFinite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
