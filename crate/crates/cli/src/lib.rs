//! Command-line driver for the hull sweep: evaluation, extremes and reports.

pub mod config;
pub mod extreme;
pub mod output;
pub mod report;
pub mod run;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some designs or cases failed, or nothing was evaluated.
    Partial,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration or input directory.
    Config(anyhow::Error),
    /// The command ran but produced no usable result.
    Partial(anyhow::Error),
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Partial(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e:#}"),
            CliError::Partial(e) => write!(f, "{e:#}"),
            CliError::Io(e) => write!(f, "{e:#}"),
        }
    }
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Success => 0,
            Status::Partial => 1,
        }
    }
}
