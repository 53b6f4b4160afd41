use thiserror::Error;

/// Errors raised by state construction, evolution and the protocol runners.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not normalized: squared norm {norm_sqr} outside tolerance {tol}")]
    NotNormalized { norm_sqr: f64, tol: f64 },

    #[error("grid shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("photon number {n} exceeds cutoff {cutoff}")]
    PhotonNumberAboveCutoff { n: usize, cutoff: usize },

    #[error("truncation leakage {leakage:e} exceeds tolerance {tol:e} at cutoff {cutoff}")]
    Leakage { leakage: f64, tol: f64, cutoff: usize },

    #[error("squeezing parameter must be non-negative, got {0}")]
    NegativeSqueezing(f64),

    #[error("superposition weights are all zero")]
    ZeroVector,

    #[error("Mandel Q is undefined for the vacuum (mean photon number 0)")]
    VacuumMandel,

    #[error("population {population:e} within one step of the grid edge exceeds {tol:e}; raise the cutoff")]
    EdgeLeakage { population: f64, tol: f64 },

    #[error("dense oracle dimension {dim} exceeds limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("kappa = {0} is equal to 1: the atom never disentangles")]
    KappaIsOne(f64),

    #[error("measurement outcome has probability {probability:e}, below {tol:e}")]
    ImpossibleOutcome { probability: f64, tol: f64 },

    #[error("pulse matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),

    #[error("sampling window is degenerate")]
    DegenerateWindow,

    #[error("invalid atom-register label {0:?}")]
    InvalidLabel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
