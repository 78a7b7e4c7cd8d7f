use std::fmt;

use crate::rational::Rational;

/// Which resource limit an evaluation ran out of.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    /// Explicit work-stack frames.
    Stack,
    /// Zigzag scan iterations (and hierarchy recursion steps).
    Iterations,
    /// Memo table entries.
    Memo,
    /// Values held by a depth-bounded enumeration.
    Enumeration,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::Stack => "stack",
            BudgetKind::Iterations => "iterations",
            BudgetKind::Memo => "memo",
            BudgetKind::Enumeration => "enumeration",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid fuse: |{a} - {b}| >= 1")]
    InvalidFuse { a: Rational, b: Rational },
    #[error("invalid fuse at node {path}: operands {a} and {b}")]
    InvalidFuseAt { path: String, a: Box<Rational>, b: Box<Rational> },
    #[error("{0} is not a dyadic rational")]
    NotDyadic(Rational),
    #[error("{0} is not positive")]
    NonPositive(Rational),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("non-canonical ordinal: {0}")]
    NonCanonical(String),
    #[error("budget exceeded ({0})")]
    BudgetExceeded(BudgetKind),
    #[error("{0} is not present in the enumerated levels")]
    NotPresent(Rational),
    #[error("successor of {0} cannot be certified at this depth")]
    Unverifiable(Rational),
    #[error("m({x}) = {m} is not a power of two")]
    NotPowerOfTwo { x: Rational, m: Rational },
    #[error("levels enumerated to depth {have}, need {need}")]
    InsufficientDepth { have: u32, need: u32 },
    #[error("ordinal subtrahend is larger than the minuend")]
    SubtrahendTooLarge,
    #[error("{0} is not a limit ordinal")]
    NotALimit(String),
    #[error("{0} is not a fusible number")]
    NotFusible(Rational),
    #[error("ordinal {0} has no fusible counterpart")]
    OutOfRange(String),
    #[error("no uniform offset between fundamental sequences of {0}")]
    NoUniformOffset(String),
    #[error("cache entry for m({x}) says {cached}, recomputed {computed}")]
    CacheMismatch { x: Box<Rational>, cached: Box<Rational>, computed: Box<Rational> },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
