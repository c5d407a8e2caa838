use thiserror::Error;

use crate::collection::Capability;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("universe ids start at 1")]
    ZeroIndex,
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("symbol {0:?} is not in the alphabet")]
    BadSymbol(char),
    #[error("{0:?} is not an integer")]
    NotAnInteger(String),
    #[error("element {0:?} does not belong to this kind of universe")]
    KindMismatch(String),
    #[error("element index does not fit in 64 bits")]
    Overflow,
}

/// Errors from building automata or reading the text format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("automaton has no states")]
    NoStates,
    #[error("state {0} out of range")]
    StateOutOfRange(usize),
    #[error("missing transition from state {state} on {symbol:?}")]
    MissingTransition { state: usize, symbol: char },
    #[error("duplicate transition from state {state} on {symbol:?}")]
    DuplicateTransition { state: usize, symbol: char },
    #[error("automata are over different alphabets")]
    AlphabetMismatch,
    #[error(
        "automaton accepts a finite language; every language in a collection must be infinite"
    )]
    FiniteLanguage,
    #[error(transparent)]
    Universe(#[from] UniverseError),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Universe(#[from] UniverseError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
    #[error("language index {index} out of range (collection has {size} languages)")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("language indices start at 1")]
    ZeroLanguageIndex,
    #[error("collection does not support {0}")]
    CapabilityMissing(Capability),
    #[error("prefix bounds differ ({0} vs {1})")]
    BoundMismatch(u64, u64),
    #[error("prefix bound must be at least 1")]
    ZeroBound,
    #[error("{0}")]
    Unsupported(String),
    #[error("sample needs at least two distinct integers, has {0}")]
    InsufficientSample(usize),
    #[error("step {step}: invariant violated: {msg}")]
    Invariant { step: usize, msg: String },
    #[error("step {step}: no output within {ceiling} iterations ({reason})")]
    IterationCeiling {
        step: usize,
        ceiling: u64,
        reason: String,
    },
    #[error("holdback element {0} is not a member of the target language")]
    HoldbackNotInTarget(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
