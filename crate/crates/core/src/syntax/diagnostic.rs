use std::fmt;

use serde::{Deserialize, Serialize};

use super::SourceLocation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Code {
    SyntaxError,
    IndentationError,
    DuplicateStrategy,
    DuplicateParameter,
    EmptyBlock,
    MultipleEmbeddedCalls,
    DanglingComment,
    UnknownStrategy,
    ArityMismatch,
    UndefinedReference,
    Unreachable,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::SyntaxError => "SyntaxError",
            Code::IndentationError => "IndentationError",
            Code::DuplicateStrategy => "DuplicateStrategy",
            Code::DuplicateParameter => "DuplicateParameter",
            Code::EmptyBlock => "EmptyBlock",
            Code::MultipleEmbeddedCalls => "MultipleEmbeddedCalls",
            Code::DanglingComment => "DanglingComment",
            Code::UnknownStrategy => "UnknownStrategy",
            Code::ArityMismatch => "ArityMismatch",
            Code::UndefinedReference => "UndefinedReference",
            Code::Unreachable => "Unreachable",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub location: SourceLocation,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>, location: SourceLocation) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message: message.into(),
            location,
        }
    }

    pub fn warning(code: Code, message: impl Into<String>, location: SourceLocation) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message: message.into(),
            location,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `file:line:col severity code message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.location, self.severity, self.code, self.message
        )
    }
}
