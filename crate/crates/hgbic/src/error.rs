use std::process::ExitCode;

use hgbic_core::Error as CoreError;

/// Failure classes of the command-line tool, one per exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    /// Classifies a library error, prefixing it with `context`.
    pub fn from_core(context: &str, err: CoreError) -> Self {
        let msg = format!("{context}: {err}");
        match err {
            CoreError::InvalidConfig(_) | CoreError::InvalidProblemSize => CliError::Usage(msg),
            CoreError::DimensionMismatch { .. }
            | CoreError::NonFinite
            | CoreError::Empty(_)
            | CoreError::InvalidResponse { .. }
            | CoreError::InvalidDispersion
            | CoreError::InvalidSupport(_)
            | CoreError::SupportTooLarge { .. } => CliError::Data(msg),
            CoreError::RankDeficient { .. }
            | CoreError::NotPositiveDefinite
            | CoreError::NonFiniteContrast
            | CoreError::NotConverged { .. }
            | CoreError::NotAdmissible
            | CoreError::AllCandidatesRejected => CliError::Numerical(msg),
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
