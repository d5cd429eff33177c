//! Process-level error split: configuration problems exit 2, data and
//! runtime problems exit 3.

use std::fmt;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Data(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Data(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<rainshape::Error> for Failure {
    fn from(e: rainshape::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

/// Attaches the file path to an I/O or parse failure.
pub fn at_path<E: fmt::Display>(path: &std::path::Path, e: E) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}
