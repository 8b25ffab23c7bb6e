use crate::cli::parse::ParseError;
use crate::connect::ConnectError;
use crate::elevate::ElevateError;
use crate::model::ValidationReport;
use crate::omega::OmegaError;
use crate::present::PresentError;
use crate::walk::WalkError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Present(#[from] PresentError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Connect(#[from] ConnectError),
    #[error(transparent)]
    Elevate(#[from] ElevateError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("validation failed with {} violation(s)", .0.violations.len())]
    Invalid(ValidationReport),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(e) => e.code(),
            Error::Present(e) => match e {
                PresentError::MalformedPresentation(..) => "E_MALFORMED_PRESENTATION",
                PresentError::ModeMismatch(..) => "E_MODE_MISMATCH",
                PresentError::InvalidTemplate(..) => "E_INVALID_TEMPLATE",
            },
            Error::Walk(e) => e.code(),
            Error::Connect(e) => e.code(),
            Error::Elevate(e) => e.code(),
            Error::Omega(e) => e.code(),
            Error::Invalid(_) => "E_VALIDATION",
            Error::Io(_) => "E_IO",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
