use thiserror::Error;

/// A positioned error from the facts, rule or statement parsers.
#[derive(Clone, Debug, Error, PartialEq)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, col: usize, kind: ParseErrorKind) -> Self {
        Self { line, col, kind }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared prefix '{0}'")]
    UndeclaredPrefix(String),
    #[error("unknown builtin '{0}'")]
    UnknownBuiltin(String),
    #[error("builtin '{0}' is not allowed in a rule head")]
    BuiltinInHead(String),
    #[error("head variable ?{0} is not bound by the rule body")]
    UnboundHeadVariable(String),
    #[error("builtin '{builtin}' uses ?{var} before it is bound")]
    UnboundBuiltinArgument { builtin: String, var: String },
    #[error("builtin '{builtin}' expects {expected} arguments, got {actual}")]
    Arity { builtin: String, expected: usize, actual: usize },
}
