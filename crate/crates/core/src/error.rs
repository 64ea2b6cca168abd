use std::fmt;

use crate::term::Fragment;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {pos}: {kind}")]
    Parse { pos: usize, kind: ParseErrorKind },

    #[error("term `{term}` lies outside the {expected} fragment (it is {found})")]
    Fragment {
        term: String,
        expected: Fragment,
        found: Fragment,
    },

    #[error("label `{0}` is not part of the structure's alphabet")]
    UnknownLabel(String),

    #[error("guard atom `{0}` is missing from the guard list")]
    MissingGuard(String),

    #[error("malformed tree: {0}")]
    Tree(String),

    #[error("malformed structure: {0}")]
    Structure(String),

    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnbalancedParen,
    UnknownOperator(String),
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::UnbalancedParen => f.write_str("unbalanced parentheses"),
            ParseErrorKind::UnknownOperator(op) => write!(f, "unknown operator `{op}`"),
            ParseErrorKind::TrailingInput => f.write_str("trailing input"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
