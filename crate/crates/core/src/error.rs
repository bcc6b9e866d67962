use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum OglError {
    #[error("group {group}: index {index} is out of range for p = {p}")]
    IndexOutOfRange { group: usize, index: i64, p: usize },

    #[error("group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("group {group}: index {index} appears more than once")]
    DuplicateIndex { group: usize, index: usize },

    #[error("group {group}: weight {weight} must be finite and strictly positive")]
    NonpositiveWeight { group: usize, weight: f64 },

    #[error("length mismatch: {what} (expected {expected}, got {got})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dual variable infeasible: group {group} has norm {norm} > bound {bound}")]
    InfeasibleDual { group: usize, norm: f64, bound: f64 },

    #[error("line search exceeded L = {limit:e} without acceptance")]
    LineSearchOverflow { limit: f64 },

    #[error("{}parse error at line {line}{}: {message}", fmt_path(path), fmt_col(*column))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error(
        "{}: row {line} has {got} columns, expected {expected}",
        fmt_path_plain(path)
    )]
    RaggedRows {
        path: Option<PathBuf>,
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("{}: file contains no data", fmt_path_plain(path))]
    EmptyFile { path: Option<PathBuf> },

    #[error("synthetic spec infeasible: {0}")]
    SpecInfeasible(String),

    #[error("labels contain a single class; balanced error rate needs both")]
    SingleClassLabels,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_path(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

fn fmt_path_plain(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => p.display().to_string(),
        None => "<input>".to_string(),
    }
}

fn fmt_col(column: Option<usize>) -> String {
    match column {
        Some(c) => format!(", column {c}"),
        None => String::new(),
    }
}

impl OglError {
    /// True for errors caused by bad user input (files, flags, shapes).
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            OglError::InfeasibleDual { .. } | OglError::LineSearchOverflow { .. }
        )
    }

    pub(crate) fn with_path(self, p: &std::path::Path) -> Self {
        match self {
            OglError::Parse {
                path: None,
                line,
                column,
                message,
            } => OglError::Parse {
                path: Some(p.to_path_buf()),
                line,
                column,
                message,
            },
            OglError::RaggedRows {
                path: None,
                line,
                expected,
                got,
            } => OglError::RaggedRows {
                path: Some(p.to_path_buf()),
                line,
                expected,
                got,
            },
            OglError::EmptyFile { path: None } => OglError::EmptyFile {
                path: Some(p.to_path_buf()),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, OglError>;
