//! One module per subcommand, plus the shared failure type that maps errors
//! onto process exit codes.

pub mod generate;
pub mod report;
pub mod run;
pub mod score;
pub mod validate;

/// A command failure carrying its exit code: 1 when stored artifacts fail
/// validation or replay, 2 for configuration and usage problems.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: impl Into<anyhow::Error>) -> Failure {
        Failure { code: 2, error: error.into() }
    }

    pub fn mismatch(error: impl Into<anyhow::Error>) -> Failure {
        Failure { code: 1, error: error.into() }
    }
}

pub type CommandResult = Result<(), Failure>;
