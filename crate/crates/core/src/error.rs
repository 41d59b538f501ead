use thiserror::Error;

use crate::field::FieldSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({0} vs {1})")]
    MixedFields(FieldSpec, FieldSpec),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("base change is singular")]
    SingularBaseChange,
    #[error("operation requires a finite prime field")]
    RequiresFiniteField,
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("catalog schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("structure matrix is not associative")]
    NotAssociative,
    #[error("unknown catalog id `{0}`")]
    UnknownEntry(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
