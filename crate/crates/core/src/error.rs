use thiserror::Error;

use crate::space::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distance matrix: {0}")]
    InvalidSpace(Violation),
    #[error("unknown point index {0}")]
    UnknownPoint(usize),
    #[error("pair ({0},{0}) is not a pair of distinct points")]
    DegeneratePair(usize),
    #[error("negative squared distance {value} for pair ({i},{j})")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("point {0} listed twice")]
    DuplicatePoint(usize),
    #[error("override pair ({0},{1}) is not a pair of the listed points")]
    ForeignPair(usize, usize),
    #[error("empty point set")]
    EmptySubset,
    #[error("seed set is not independent")]
    NotIndependent,
    #[error("point set is not {0}-embeddable")]
    NotEmbeddable(usize),
    #[error("target dimension must be at least 1")]
    ZeroDimension,
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("outlier-only solver called with k_mod = {0}")]
    ModificationsNotSupported(usize),
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("matrix column {0} is zero")]
    ZeroColumn(usize),
    #[error("rank reduction h = {h} exceeds rank {rank} (or leaves dimension 0)")]
    RankTooSmall { h: usize, rank: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
