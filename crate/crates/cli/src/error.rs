use std::fmt;

/// Error reported by the CLI, already phrased for the user.
#[derive(Debug)]
pub struct CliError(pub String);

pub type CliResult<T> = Result<T, CliError>;

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl From<metroscope::Error> for CliError {
    fn from(e: metroscope::Error) -> Self {
        let hint = match &e {
            metroscope::Error::Capacity { .. } => {
                "; the full space is limited to small N, use --space sym or a smaller --N"
            }
            metroscope::Error::TooManySkips { .. } => "; rerun with another --seed or report the failing sample",
            _ => "",
        };
        Self(format!("{e}{hint}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self(format!("I/O error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self(format!("invalid configuration: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self(format!("CSV error: {e}"))
    }
}
