use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent configuration input.
    #[error("configuration error: {0}")]
    Config(String),
    /// A field or parameter outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
    /// Hole placement could not satisfy the geometric constraints.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// A linear system turned out numerically singular.
    #[error("singular system: {0}")]
    Singular(String),
    /// An iterative solve stopped before reaching its tolerance.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    /// Two computations that must agree did not.
    #[error("consistency check failed: {0}")]
    Mismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the user's input rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
