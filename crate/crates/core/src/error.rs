use thiserror::Error;

use crate::causality::Condition;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("model is cyclic: {}", .0.join(" -> "))]
    CyclicModel(Vec<String>),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value {value} is out of range for `{variable}`")]
    ValueOutOfRange { variable: String, value: i64 },

    #[error("duplicate definition of `{0}`")]
    DuplicateDefinition(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("formula is not intervention-free: {0}")]
    MalformedPhi(String),

    #[error("the extended rule variant needs a normality order")]
    MissingNormalityOrder,

    #[error("search budget of {0} solve calls exceeded")]
    SearchBudgetExceeded(u64),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("not a witness: {0}")]
    NotAWitness(String),

    #[error("witness contingency equals the actual values of its variables")]
    WitnessEqualsActual,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no witness exists for this candidate cause")]
    NoWitness,

    #[error("candidate is not a cause: {0} fails")]
    NotACause(Condition),

    #[error("corpus error: {0}")]
    Corpus(String),
}

pub type Result<T> = std::result::Result<T, Error>;
