//! Error classes of the runner, each with its own process exit code.

use std::fmt;

use heatscope_core::Error as CoreError;
use serde_json::{json, Value};

use crate::config::Diagnostic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    ConfigRead,
    Validation,
    UnknownKind,
    Domain,
    Contract,
    Resource,
    Strict,
    Output,
}

impl ErrorClass {
    pub fn code(self) -> i32 {
        match self {
            ErrorClass::Usage => 2,
            ErrorClass::ConfigRead => 3,
            ErrorClass::Validation => 4,
            ErrorClass::UnknownKind => 5,
            ErrorClass::Domain => 6,
            ErrorClass::Contract => 7,
            ErrorClass::Resource => 8,
            ErrorClass::Strict => 9,
            ErrorClass::Output => 10,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::ConfigRead => "config_read",
            ErrorClass::Validation => "validation",
            ErrorClass::UnknownKind => "unknown_kind",
            ErrorClass::Domain => "domain",
            ErrorClass::Contract => "contract",
            ErrorClass::Resource => "resource",
            ErrorClass::Strict => "strict_tolerance",
            ErrorClass::Output => "output",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunError {
    pub class: ErrorClass,
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl RunError {
    pub fn new(class: ErrorClass, message: impl Into<String>) -> Self {
        RunError { class, message: message.into(), diagnostics: Vec::new() }
    }

    pub fn output(message: impl Into<String>) -> Self {
        RunError::new(ErrorClass::Output, message)
    }

    pub fn validation(diagnostics: Vec<Diagnostic>) -> Self {
        let class = if diagnostics.iter().any(|d| d.field == "kind") {
            ErrorClass::UnknownKind
        } else {
            ErrorClass::Validation
        };
        let message = format!("config has {} problem(s)", diagnostics.len());
        RunError { class, message, diagnostics }
    }

    pub fn code(&self) -> i32 {
        self.class.code()
    }

    /// The machine-readable form printed on stderr.
    pub fn to_json(&self) -> Value {
        json!({
            "error": {
                "class": self.class.as_str(),
                "code": self.code(),
                "message": self.message,
                "diagnostics": self.diagnostics,
            }
        })
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.class.as_str(), self.message)?;
        for d in &self.diagnostics {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for RunError {}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        let class = match e {
            CoreError::Domain(_) => ErrorClass::Domain,
            CoreError::Contract(_) => ErrorClass::Contract,
            CoreError::Resource { .. } => ErrorClass::Resource,
        };
        RunError::new(class, e.to_string())
    }
}
