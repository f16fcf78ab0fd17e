use hfss_core::ErrorClass;

/// A command failure, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    pub fn corrupt(path: &std::path::Path, what: impl std::fmt::Display) -> Self {
        Failure::Io(format!("corrupt archive {}: {what}", path.display()))
    }
}

impl From<hfss_core::Error> for Failure {
    fn from(e: hfss_core::Error) -> Self {
        match e.class() {
            ErrorClass::Validation => Failure::Validation(e.to_string()),
            ErrorClass::Numerical => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;
