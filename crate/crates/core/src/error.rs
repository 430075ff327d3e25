use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An argument lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),

    /// The schedule cannot be explained by a single sinusoidal switching function.
    #[error("schedule is not extremal: {0}")]
    NotExtremal(String),

    #[error("no feasible schedule found with up to {max_switchings} switchings at resolution {resolution}")]
    Infeasible { max_switchings: usize, resolution: f64 },

    #[error("schedule structure not supported: {0}")]
    Structural(String),

    /// Spatial grid too coarse to represent the requested eigenstate.
    #[error("grid resolution error: {0}")]
    Resolution(String),

    /// Grid does not contain the transported packet.
    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(name))
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    require_finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be > 0, got {value}"),
        })
    }
}
