use thiserror::Error;

/// Errors produced anywhere in the engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A symbol code is outside the alphabet.
    #[error("symbol {symbol} is outside the alphabet of size {size}")]
    SymbolOutOfRange { symbol: u32, size: usize },

    /// Two automata over different alphabets were combined.
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    /// A structural automaton invariant was violated.
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    /// A packed word where some track resumes after its padding began.
    #[error("ill-formed convolution: {0}")]
    IllFormed(String),

    /// Track index or permutation is invalid for the relation's arity.
    #[error("invalid track: {0}")]
    InvalidTrack(String),

    /// Formula text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Formula does not fit the presentation's signature.
    #[error("signature error: {0}")]
    Signature(String),

    /// Wrong number of free variables for the requested operation.
    #[error("free variables: {0}")]
    FreeVariables(String),

    /// `p` is not an odd prime.
    #[error("p must be an odd prime (got {0})")]
    NotOddPrime(u32),

    /// A multiplication table failed the group axioms.
    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    /// A word is not in the presentation's domain.
    #[error("word {0} is not in the domain")]
    NotInDomain(String),

    /// A relation that must be a total function is not.
    #[error("not a total function: {0}")]
    NotFunctional(String),

    /// Oracle elements of different kind, prime or rank were combined.
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    /// An element needs more generators than the oracle's rank.
    #[error("rank overflow: needs rank {needed}, have {rank}")]
    RankOverflow { needed: usize, rank: usize },

    /// A cocycle, equivalence or extension datum fails its consistency sentence.
    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    /// The operation is not available for this kind of presentation.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Filesystem or serialization failure.
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
