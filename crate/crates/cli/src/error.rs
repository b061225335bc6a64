use std::process::ExitCode;

use mdprolate::bandspec::Violation;
use mdprolate::Error;
use serde::Serialize;

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Config {
        message: String,
        violations: Vec<Violation>,
    },
    /// A computation failed: exit code 1.
    Runtime(String),
}

#[derive(Serialize)]
struct Payload<'a> {
    error: &'static str,
    message: &'a str,
    #[serde(skip_serializing_if = "<[Violation]>::is_empty")]
    violations: &'a [Violation],
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config {
            message: message.into(),
            violations: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config { .. } => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }

    pub fn to_json(&self) -> String {
        let payload = match self {
            CliError::Config {
                message,
                violations,
            } => Payload {
                error: "config",
                message,
                violations,
            },
            CliError::Runtime(message) => Payload {
                error: "runtime",
                message,
                violations: &[],
            },
        };
        serde_json::to_string(&payload).expect("error payload serializes")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::InvalidBands(violations) => CliError::Config {
                message,
                violations,
            },
            Error::GridTooSmall { .. }
            | Error::Nyquist { .. }
            | Error::DimensionMismatch { .. }
            | Error::ShapeMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::CapExceeded { .. }
            | Error::EmptyDictionary
            | Error::Json(_) => CliError::config(message),
            Error::Eigensolver { .. }
            | Error::Svd(_)
            | Error::GapBound { .. }
            | Error::NonFinite(_)
            | Error::Io(_)
            | Error::Csv(_) => CliError::Runtime(message),
        }
    }
}
