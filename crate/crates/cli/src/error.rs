use std::process::ExitCode;

use qcrb_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for usage, configuration and parameter errors; 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::InvalidWeight(_)
                | Error::DegenerateWeight(_)
                | Error::InvalidArgument(_)
                | Error::InvalidBeta(_)
                | Error::InvalidStep(_)
                | Error::UnsupportedConfiguration(_)
                | Error::TruncationTooSmall { .. }
                | Error::InsufficientGrid(_)
                | Error::NotNormalized { .. } => 2,
                _ => 3,
            },
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_errors_are_usage_and_numerics_are_three() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(Error::InvalidWeight(1.5)).exit_code(), 2);
        assert_eq!(
            CliError::from(Error::TruncationTooSmall { n_max: 3, tail: 0.1 }).exit_code(),
            2
        );
        assert_eq!(
            CliError::from(Error::EigensolverFailure("no convergence".into())).exit_code(),
            3
        );
        assert_eq!(
            CliError::from(Error::FcDivergence {
                max_weight_derivative: 1.0
            })
            .exit_code(),
            3
        );
    }
}
