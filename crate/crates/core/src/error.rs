use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis mismatch: `{left}` vs `{right}`")]
    BasisMismatch { left: String, right: String },

    #[error("invalid size for {what}: {reason}")]
    InvalidSize { what: &'static str, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("velocity field is not divergence free (spectral residual {residual:.3e})")]
    NotDivergenceFree { residual: f64 },

    #[error("homology denominator overflow at resonant mode k = {k} (|e^(2 pi i k alpha) - 1| = {denominator:.3e})")]
    ResonantDenominator { k: i64, denominator: f64 },

    #[error("resolution failure: {0}")]
    Resolution(String),

    #[error("step size too large: unitary substep grew the norm by a factor {growth}")]
    StepSize { growth: f64 },

    #[error("dense oracle limited to dimension {max}, got {dim}")]
    OracleSize { dim: usize, max: usize },

    #[error("operator lacks capability: {0}")]
    MissingCapability(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("bound violated: measured {measured:.6e} exceeds {bound:.6e}")]
    BoundViolated { measured: f64, bound: f64 },

    #[error("degeneracy grouping error: {0}")]
    Grouping(String),

    #[error("temperature left [0, 1]: value {value:.3e} at grid point {index} (t = {time})")]
    RangeViolation { value: f64, index: usize, time: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("fit window [{lo}, {hi}] lies outside the sampled range")]
    WindowOutOfRange { lo: f64, hi: f64 },

    #[error("step budget of {0} steps exhausted")]
    StepBudget(usize),

    #[error("eigensolver failure: {0}")]
    EigenSolver(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn size(what: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidSize {
            what,
            reason: reason.into(),
        }
    }
}
