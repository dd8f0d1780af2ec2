use multinorm::lee::LeeError;
use multinorm::ono::OnoError;
use multinorm::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const CONTRACT: i32 = 4;
    pub const NON_INTEGRAL: i32 = 5;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{key}: {message}")]
    Semantic { key: String, message: String },
    #[error("{}{error}", key.as_ref().map(|k| format!("{k}: ")).unwrap_or_default())]
    Module { key: Option<String>, error: Box<CoreError> },
}

impl CliError {
    pub fn module(key: Option<String>, error: impl Into<CoreError>) -> Self {
        CliError::Module { key, error: Box::new(error.into()) }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Syntax { .. } => exit::PARSE,
            CliError::Semantic { .. } => exit::VALIDATION,
            CliError::Module { error, .. } => match &**error {
                CoreError::Lee(
                    LeeError::ProviderContractViolation(_)
                    | LeeError::MissingOverride(_)
                    | LeeError::TruncationViolated { .. },
                ) => exit::CONTRACT,
                CoreError::Ono(OnoError::NonIntegralClassNumber { .. }) => exit::NON_INTEGRAL,
                _ => exit::VALIDATION,
            },
        }
    }

    /// Short tag for machine output.
    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            exit::PARSE if matches!(self, CliError::Io { .. }) => "io",
            exit::PARSE => "parse",
            exit::CONTRACT => "contract",
            exit::NON_INTEGRAL => "non-integral",
            _ => "validation",
        }
    }
}
