use thiserror::Error;

/// Errors raised by geometry validation and the morphology kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("window extent must be at least 1, got 0")]
    ZeroExtent,
    #[error("window extent must be odd, got {0}")]
    EvenExtent(usize),
    #[error("invalid image geometry: {0}")]
    InvalidDimensions(String),
    #[error("sequence must contain at least one value")]
    EmptySequence,
    #[error("unsupported tile: {0}")]
    UnsupportedTile(String),
    #[error("calibration needs at least 3 repetitions, got {0}")]
    InsufficientReps(usize),
    #[error("invalid window list: {0}")]
    InvalidWindows(String),
}

pub type Result<T> = std::result::Result<T, MorphError>;

/// Rejects zero and even window extents.
pub(crate) fn check_window(w: usize) -> Result<()> {
    if w == 0 {
        Err(MorphError::ZeroExtent)
    } else if w.is_multiple_of(2) {
        Err(MorphError::EvenExtent(w))
    } else {
        Ok(())
    }
}
