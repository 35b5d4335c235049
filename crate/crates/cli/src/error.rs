use std::fmt;
use std::ops::Range;

use thiserror::Error;

/// Byte range into the source text of an expression.
pub type Span = Range<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("syntax error at {}: {msg}", fmt_span(.span))]
    Syntax { msg: String, span: Span },
    #[error("unknown name `{name}` at {}", fmt_span(.span))]
    UnknownName { name: String, span: Span },
    #[error("type mismatch at {}: {msg}", fmt_span(.span))]
    TypeMismatch { msg: String, span: Span },
    #[error("at {}: {source}", fmt_span(.span))]
    Math { source: nearca::Error, span: Span },
    #[error("{0}")]
    Core(#[from] nearca::Error),
    #[error("in {arg}: {source}")]
    InArgument { arg: String, source: Box<CliError> },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

fn fmt_span(span: &Span) -> impl fmt::Display {
    format!("{}..{}", span.start, span.end)
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "syntax",
            CliError::UnknownName { .. } => "unknown_name",
            CliError::TypeMismatch { .. } => "type_mismatch",
            CliError::Math { .. } | CliError::Core(_) => "math",
            CliError::InArgument { source, .. } => source.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }

    pub fn span(&self) -> Option<&Span> {
        match self {
            CliError::Syntax { span, .. }
            | CliError::UnknownName { span, .. }
            | CliError::TypeMismatch { span, .. }
            | CliError::Math { span, .. } => Some(span),
            CliError::InArgument { source, .. } => source.span(),
            _ => None,
        }
    }

    /// Drops the span of a math error that has no single source position.
    pub fn unspanned(self) -> Self {
        match self {
            CliError::Math { source, .. } => CliError::Core(source),
            other => other,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn in_arg(self, arg: &str) -> CliError {
        CliError::InArgument { arg: arg.to_string(), source: Box::new(self) }
    }
}
