use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("zero displacement passed to the Green's tensor")]
    ZeroDisplacement,

    #[error("|k∥| = {k_par} exceeds k₀ = {k0}; evanescent spin waves are not supported")]
    Evanescent { k_par: f64, k0: f64 },

    #[error("plane-wave modes have no finite norm (per-unit-area convention applies)")]
    PlaneWaveNorm,

    #[error("detection waist {detection} does not match drive waist {drive}")]
    WaistMismatch { drive: f64, detection: f64 },

    #[error("operation requires a {expected} mode")]
    ModeKind { expected: &'static str },

    #[error("no reflected light to normalise against")]
    ZeroSignal,

    #[error("linear solve failed: {0}")]
    Linalg(String),

    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("pair space has {unknowns} unknowns, above the cap of {cap}; shrink the array")]
    PairSpaceTooLarge { unknowns: usize, cap: usize },

    #[error("blockade basis exceeds {cap} states (at least {count} found)")]
    BasisTooLarge { count: usize, cap: usize },

    #[error("missing configuration value `{0}`")]
    MissingConstant(&'static str),

    #[error("constants file: {0}")]
    Constants(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
