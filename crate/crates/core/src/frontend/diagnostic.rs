use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Syntax,
    Semantic,
}

/// A located message about a program, produced by parsing or checking.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub phase: Phase,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn syntax(at: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            phase: Phase::Syntax,
            line: at.line,
            col: at.col,
            message: message.into(),
        }
    }

    pub fn semantic(at: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            phase: Phase::Semantic,
            line: at.line,
            col: at.col,
            message: message.into(),
        }
    }

    pub fn warning(at: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            phase: Phase::Semantic,
            line: at.line,
            col: at.col,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let phase = match self.phase {
            Phase::Syntax => "syntax",
            Phase::Semantic => "semantic",
        };
        write!(
            f,
            "{}:{}: {sev} ({phase}): {}",
            self.line, self.col, self.message
        )
    }
}

/// True if any diagnostic blocks execution.
pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
