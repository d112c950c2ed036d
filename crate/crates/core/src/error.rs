use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("point ({x}, {y}) is not in M")]
    NotInM { x: String, y: String },

    #[error("point ({x}, {y}) is not in the annihilator lattice")]
    NotInAnnihilator { x: String, y: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Hermite index {k} out of range for truncation dimension {dim}")]
    HermiteIndex { k: usize, dim: usize },

    #[error("index ({j}, {k}) violates the aliasing bound: |j|, |k| must be < {bound}")]
    Aliasing { j: i64, k: i64, bound: i64 },

    #[error("{coord} coordinate {value} is not aligned with the grid step {step}")]
    NotGridAligned {
        coord: &'static str,
        value: String,
        step: String,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operator rank {rank} must be strictly smaller than a = {a}")]
    RankTooLarge { rank: usize, a: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}
