//! CLI error channeling with distinct exit codes per failure class.

use std::fmt;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug)]
pub enum AppError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => EXIT_VALIDATION,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Validation(m) => write!(f, "invalid request: {m}"),
            Self::Numerical(m) => write!(f, "numerical failure: {m}"),
            Self::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl From<haartrunc::Error> for AppError {
    fn from(e: haartrunc::Error) -> Self {
        use haartrunc::Error::*;
        match e {
            EigensolverFailure { .. } | SingularDraw | NumericalFailure(_) => {
                Self::Numerical(e.to_string())
            }
            _ => Self::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type AppResult<T> = Result<T, AppError>;
