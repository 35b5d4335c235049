use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group element: {0}")]
    InvalidElement(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs a finite field, got characteristic zero")]
    WrongCharacteristic,
    #[error("term budget of {budget} exceeded (too many monomials or term products)")]
    TermBlowup { budget: usize },
    #[error("enumeration budget of {budget} exceeded (needed {needed})")]
    EnumerationBudgetExceeded { budget: u64, needed: u128 },
    #[error("search budget exceeded: {0}")]
    SearchBudgetExceeded(String),
    #[error("operation requires a finite group")]
    InfiniteGroup,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("coefficient field of degree {needed} does not embed in level {level}")]
    CoefficientFieldTooLarge { needed: u32, level: u32 },
    #[error("undecidable on this backend: {0}")]
    Undecidable(String),
    #[error("section check failed: {0}")]
    SectionFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(what: impl Into<String>) -> Error {
    Error::ContextMismatch(what.into())
}
