use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("profile mean {mean:e} exceeds zero-mean tolerance {tol:e}; constant offsets belong in the background")]
    NonZeroMean { mean: f64, tol: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("delta term at x = {position} lies outside the open grid interval ({x_min}, {x_max})")]
    DeltaOutsideGrid { position: f64, x_min: f64, x_max: f64 },

    #[error("potential is not finite at x = {x}")]
    NonFinitePotential { x: f64 },

    #[error("eigensolver failed to converge for eigenpair index {index}")]
    NonConvergence { index: usize },

    #[error("phase constraints cannot be satisfied near k = {target}: {reason}")]
    UnsatisfiablePhase { target: f64, reason: String },

    #[error("trajectory blew up at x = {at}")]
    Blowup { at: f64 },

    #[error("scale separation ratio {ratio:.3} is below the required minimum {min}")]
    ScaleSeparation { ratio: f64, min: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short tag for machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonZeroMean { .. } => "nonzero_mean",
            Error::InvalidProfile(_) => "invalid_profile",
            Error::InvalidEnvelope(_) => "invalid_envelope",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::DeltaOutsideGrid { .. } => "delta_outside_grid",
            Error::NonFinitePotential { .. } => "non_finite_potential",
            Error::NonConvergence { .. } => "non_convergence",
            Error::UnsatisfiablePhase { .. } => "unsatisfiable_phase",
            Error::Blowup { .. } => "blowup",
            Error::ScaleSeparation { .. } => "scale_separation",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
