use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("chain too short: {sites} sites, operator needs at least {needed}")]
    ChainTooShort { sites: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver failure: {0}")]
    EigenFailure(String),

    #[error(
        "unfolding fit is non-monotonic inside the kept window at degree {degree}; \
         retry with a lower polynomial degree"
    )]
    NonMonotoneUnfolding { degree: usize },

    #[error(
        "degenerate spacing ensemble: {zero_fraction:.1}% zero spacings exceeds the 30% limit; \
         Brody fit refused"
    )]
    DegenerateEnsemble { zero_fraction: f64 },

    #[error("insufficient levels: {have} after truncation, need at least {need}")]
    InsufficientLevels { have: usize, need: usize },

    #[error("no entropy plateau detected; extend the time grid")]
    NoPlateau,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
