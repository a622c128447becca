use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid dimension N = {n} (need N >= {min})")]
    InvalidDimension { n: u32, min: u32 },

    #[error("odd number of points k = {k}; pairings need even k")]
    OddOrder { k: usize },

    #[error("index {index} exceeds dimension N = {n}")]
    InvalidIndex { index: u32, n: u32 },

    #[error("Gram matrix is singular at k = {k}, N = {n}")]
    Singular { k: usize, n: u32 },

    #[error("moment of length k = {k} at N = {n} needs a {table_size}x{table_size} table, above kmax = {kmax}")]
    Resource {
        k: usize,
        n: u32,
        table_size: usize,
        kmax: usize,
    },

    #[error("inadmissible three-vertex parameters (n, k, l) = ({n}, {k}, {l})")]
    Inadmissible { n: u32, k: u32, l: u32 },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("pairings live on different point counts ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid contraction position {position} for a word of length {len}")]
    InvalidPosition { position: usize, len: usize },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exact solver failed to converge at k = {k}, N = {n}")]
    SolverDiverged { k: usize, n: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
