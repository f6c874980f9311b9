use std::fmt;

/// Failure categories, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Data,
    Numerical,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Data => 3,
            Kind::Numerical => 4,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Kind::Usage => "usage",
            Kind::Data => "data",
            Kind::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Usage, message: msg.into() }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Data, message: msg.into() }
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Self { kind: Kind::Numerical, message: msg.into() }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// Prefix the message with some context.
    pub fn context(mut self, what: impl fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

/// One line, `error[kind]: message`, with embedded newlines flattened.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error[{}]: {flat}", self.kind.tag())
    }
}

impl std::error::Error for CliError {}

impl From<sensormap::Error> for CliError {
    fn from(e: sensormap::Error) -> Self {
        if e.is_numerical() {
            CliError::numerical(e.to_string())
        } else {
            CliError::data(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Read a whole file, naming it on failure.
pub fn read_file(path: &std::path::Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &std::path::Path, contents: &[u8]) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_rendering() {
        let e = CliError::data("bad\nrow\t 3");
        assert_eq!(e.to_string(), "error[data]: bad row 3");
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn core_errors_are_classified() {
        let n: CliError = sensormap::Error::NoConvergence { budget: 30 }.into();
        assert_eq!(n.kind, Kind::Numerical);
        let d: CliError = sensormap::Error::InvalidInput("x".into()).into();
        assert_eq!(d.kind, Kind::Data);
    }
}
