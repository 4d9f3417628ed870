use latcomp_core::flip::FlipError;
use latcomp_core::potential::PotentialError;
use latcomp_core::shift::ShiftError;
use latcomp_core::simulator::StepError;
use latcomp_core::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(#[from] StepError),
    #[error("numerics failure: {0}")]
    Numerics(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 parse, 3 invalid schedule, 4 numerics, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::InvalidSchedule(_) => 3,
            CliError::Numerics(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn parse(msg: impl std::fmt::Display) -> Self {
        CliError::Parse(msg.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::Io(io),
                other => CliError::Parse(format!("{other:?}")),
            }
        } else {
            CliError::Parse(e.to_string())
        }
    }
}

// Unphysical parameters are bad input, not a numerical breakdown.
impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Numerics(e.to_string())
    }
}

impl From<ShiftError> for CliError {
    fn from(e: ShiftError) -> Self {
        match e {
            ShiftError::Potential(p) => p.into(),
            ShiftError::Invalid(m) => CliError::Parse(m.to_string()),
            ShiftError::Spectral(s) => s.into(),
        }
    }
}

impl From<FlipError> for CliError {
    fn from(e: FlipError) -> Self {
        match e {
            FlipError::IntegrationFailure(_) => CliError::Numerics(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
