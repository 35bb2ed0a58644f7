use thiserror::Error;

use crate::set::SubsetWord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} is outside 1..=64")]
    GroundSetSize(u32),
    #[error("subset {bits:#x} has elements outside [{n}]")]
    SubsetOutOfRange { bits: u64, n: u32 },
    #[error("element {element} is outside [{n}]")]
    ElementOutOfRange { element: u32, n: u32 },
    #[error("pair conflict test requires distinct sets, got {0} twice")]
    IdenticalPair(SubsetWord),
    #[error("invalid predicate: {0}")]
    InvalidPredicate(String),
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),
    #[error("size guard exceeded: {what} ({actual} > {limit})")]
    SizeGuard {
        what: &'static str,
        actual: u128,
        limit: u128,
    },
    #[error("family is not a union of full levels")]
    NotLevelUnion,
    #[error("family violates {predicate}: {a} vs {b}")]
    InvalidFamily {
        predicate: String,
        a: SubsetWord,
        b: SubsetWord,
    },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
