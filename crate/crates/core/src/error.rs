use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The variants are grouped by how the CLI reports them: argument and
/// precondition problems are usage errors, guard violations are numerical
/// errors, and positivity or analysis-assumption failures get their own code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical guard violated: {0}")]
    NumericalGuard(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("density lost positivity: most negative grid value {min} at ({x1}, {x2})")]
    Positivity { min: f64, x1: f64, x2: f64 },

    #[error("analysis assumption violated: {0}")]
    Assumption(String),

    #[error("degenerate bifurcation: {0}")]
    Degenerate(String),

    #[error("left the perturbative regime at t = {t}: |amplitude| = {amplitude}")]
    LeftPerturbativeRegime { t: f64, amplitude: f64 },

    #[error("no instability: {0}")]
    NoInstability(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit status: 2 usage, 3 numerical guard, 4 positivity or
    /// analysis assumption, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Precondition(_) => 2,
            Error::NumericalGuard(_) | Error::NonFinite(_) | Error::LeftPerturbativeRegime { .. } => 3,
            Error::Positivity { .. }
            | Error::Assumption(_)
            | Error::Degenerate(_)
            | Error::NoInstability(_) => 4,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {v}")))
    }
}
