//! Parse and check errors with source locations.

use std::fmt;

use thiserror::Error;

/// 1-based line/column position in a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Error)]
pub enum ParseError {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: Location, message: String },
    #[error("check error at {location}: {message}")]
    Check { location: Location, message: String },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { location, .. } | ParseError::Check { location, .. } => *location,
        }
    }

    pub fn is_syntax(&self) -> bool {
        matches!(self, ParseError::Syntax { .. })
    }

    pub fn is_check(&self) -> bool {
        matches!(self, ParseError::Check { .. })
    }
}
