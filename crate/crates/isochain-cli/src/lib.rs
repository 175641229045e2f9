//! Library half of the `isochain` command: configuration parsing and
//! command dispatch, kept out of `main` so they can be tested in-process.

mod commands;
mod config;

use isochain::helmholtz::FdError;
use isochain::inverse::InverseError;
use isochain::waveguide::DesignError;
use thiserror::Error;

pub use commands::{run, Artifacts, REPORT_SCHEMA_VERSION};
pub use config::{parse_config, Command, Pin, RunConfig, Source, Task, DEFAULT_STEPS_PER_WIDTH};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] isochain::Error),
    #[error("io: {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for anything the user can fix in the config or its inputs, 1 for
    /// solver and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Input(_) => 2,
            Self::Io { .. } => 1,
            Self::Solver(e) => {
                if is_input_error(e) {
                    2
                } else {
                    1
                }
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Input(_) => "input",
            Self::Io { .. } => "io",
            Self::Solver(e) if is_input_error(e) => "input",
            Self::Solver(_) => "solver",
        }
    }

    /// `{"error": kind, "message": text, "exit_code": n}` on one line.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

fn is_input_error(e: &isochain::Error) -> bool {
    use isochain::Error as E;
    match e {
        E::Spectral(_) | E::Model(_) | E::Csv(_) => true,
        E::Inverse(e) => !matches!(
            e,
            InverseError::NoConvergence { .. }
                | InverseError::InfeasiblePins { .. }
                | InverseError::TooManySkipped { .. }
                | InverseError::NotAnEigenvector { .. }
        ),
        E::Design(DesignError::Fd(e)) | E::Fd(e) => {
            !matches!(e, FdError::ConvergenceFailure { .. } | FdError::NoBoundState { .. } | FdError::Io(_))
        }
        E::Design(DesignError::Spectral(_)) => true,
        E::Design(_) => true,
        E::Io(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use isochain::spectral::SpectralError;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let asym: isochain::Error = SpectralError::Asymmetric { violation: 1.0, tolerance: 1e-12 }.into();
        assert_eq!(CliError::from(asym).exit_code(), 2);
        let stuck: isochain::Error = InverseError::NoConvergence { best_residual: 1.0, restarts: 3 }.into();
        let e = CliError::from(stuck);
        assert_eq!(e.exit_code(), 1);
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"], "solver");
        assert_eq!(v["exit_code"], 1);
    }
}
