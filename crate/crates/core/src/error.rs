use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Anharmonicity is zero; every closed form divides by it.
    #[error("degenerate parameters: {0}")]
    DegenerateParameter(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A value that is mathematically guaranteed was violated beyond rounding.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no oscillation detected: {0}")]
    NoOscillation(String),

    #[error("grid resolution insufficient: {0}")]
    Resolution(String),

    #[error("phase box too small: {0}")]
    BoxTooSmall(String),

    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InternalConsistency(_)
                | Error::Resolution(_)
                | Error::BoxTooSmall(_)
                | Error::NoOscillation(_)
        )
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
