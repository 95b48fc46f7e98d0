use std::fmt;

use crate::syntax::{ParseError, SourcePos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// Machine-readable diagnostic category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    ParseError,
    DuplicateName,
    DuplicateIndexVariable,
    UnknownBounds,
    UnknownTable,
    ArityMismatch,
    TypeMismatch,
    BooleanExpected,
    MisplacedAll,
    UnboundIndexVariable,
    BadIndexExpression,
    UnknownFunction,
    BadArgumentCount,
    UnsupportedMatchType,
    UncoveredCell,
    OverlappingRules,
    IndexOutOfBounds,
    UnusedEquation,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::ParseError => "ParseError",
            Code::DuplicateName => "DuplicateName",
            Code::DuplicateIndexVariable => "DuplicateIndexVariable",
            Code::UnknownBounds => "UnknownBounds",
            Code::UnknownTable => "UnknownTable",
            Code::ArityMismatch => "ArityMismatch",
            Code::TypeMismatch => "TypeMismatch",
            Code::BooleanExpected => "BooleanExpected",
            Code::MisplacedAll => "MisplacedAll",
            Code::UnboundIndexVariable => "UnboundIndexVariable",
            Code::BadIndexExpression => "BadIndexExpression",
            Code::UnknownFunction => "UnknownFunction",
            Code::BadArgumentCount => "BadArgumentCount",
            Code::UnsupportedMatchType => "UnsupportedMatchType",
            Code::UncoveredCell => "UncoveredCell",
            Code::OverlappingRules => "OverlappingRules",
            Code::IndexOutOfBounds => "IndexOutOfBounds",
            Code::UnusedEquation => "UnusedEquation",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub pos: SourcePos,
}

impl Diagnostic {
    pub fn error(code: Code, pos: SourcePos, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message: message.into(),
            pos,
        }
    }

    pub fn warning(code: Code, pos: SourcePos, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message: message.into(),
            pos,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `severity code line:col message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.severity.as_str(),
            self.code,
            self.pos,
            self.message
        )
    }
}

impl From<&ParseError> for Diagnostic {
    fn from(err: &ParseError) -> Self {
        let message = match err {
            ParseError::Lex(e) => e.to_string(),
            ParseError::Unexpected {
                expected, found, ..
            } => {
                let exp = match expected.as_slice() {
                    [one] => one.clone(),
                    many => format!("one of {}", many.join(", ")),
                };
                format!("expected {exp}, found {found}")
            }
            ParseError::Invalid { message, .. } => message.clone(),
        };
        // Lex errors already carry their position in the text.
        let message = message
            .strip_prefix(&format!("{}: ", err.pos()))
            .map(str::to_string)
            .unwrap_or(message);
        Diagnostic::error(Code::ParseError, err.pos(), message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_format() {
        let d = Diagnostic::error(
            Code::UncoveredCell,
            SourcePos::new(3, 7, 40),
            "no rule for x[1]",
        );
        assert_eq!(d.to_string(), "error UncoveredCell 3:7 no rule for x[1]");
    }

    #[test]
    fn lex_error_message_not_doubled() {
        let err = crate::syntax::parse_document("x # y").unwrap_err();
        let d = Diagnostic::from(&err[0]);
        assert_eq!(d.to_string(), "error ParseError 1:3 illegal character '#'");
    }
}
