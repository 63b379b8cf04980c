use thiserror::Error;

/// Errors raised by the lattice, transfer, evolution and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter lies outside the domain of the operation.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// Two grids that must be refinements of one another are not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A negative-power multiplier was applied to a field with a nonzero mean mode.
    #[error("singular multiplier: zero-frequency coefficient has magnitude {0:e}")]
    SingularMultiplier(f64),

    /// A continuum field does not decay at the box boundary, so the torus
    /// no longer stands in for the whole space.
    #[error("domain truncation: boundary/peak ratio {ratio:e} exceeds {limit:e} at t = {t}")]
    DomainTruncation { ratio: f64, limit: f64, t: f64 },

    /// A continuum field carries spectral mass too close to the reference Nyquist band.
    #[error("under-resolved reference: spectral tail fraction {tail:e} exceeds {limit:e}")]
    UnderResolved { tail: f64, limit: f64 },

    /// Non-finite values or runaway growth detected during time stepping.
    #[error("evolution diverged at step {step} (t = {t}): {reason}")]
    Divergence { step: usize, t: f64, reason: String },

    /// Adaptive quadrature could not meet its tolerance.
    #[error("quadrature did not converge: achieved relative change {achieved:e}")]
    Accuracy { achieved: f64 },

    /// Trajectory snapshots are too sparse for a time quadrature.
    #[error("insufficient time sampling: {0}")]
    Sampling(String),

    /// Equation parameters fall outside the global well-posedness windows.
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
