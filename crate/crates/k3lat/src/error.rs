use thiserror::Error;

use crate::exact_linalg::LinalgError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("degenerate lattice")]
    Degenerate,
    #[error("lattice not even")]
    NotEven,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("degenerate sublattice")]
    DegenerateSublattice,
    #[error("vector does not lie in the lattice: {0}")]
    NotInLattice(String),
    #[error("symbol parse error at offset {offset}: {msg}")]
    SymbolParse { offset: usize, msg: String },
    #[error("invalid finite quadratic form: {0}")]
    InvalidForm(String),
    #[error("oracle bound exceeded: group order {order} > {bound}")]
    OracleBound { order: u64, bound: u64 },
    #[error("oracle search budget exhausted after {0} nodes")]
    OracleBudget(u64),
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),
    #[error("not a simply-laced root system: {0}")]
    NotSimplyLaced(String),
    #[error("niemeier: {0}")]
    Niemeier(String),
    #[error("degeneration parse error: {0}")]
    DegenParse(String),
    #[error("vertex count mismatch: orbits have {orbits} vertices, ambient {ambient} has {ambient_count}")]
    VertexMismatch { orbits: usize, ambient: String, ambient_count: usize },
    #[error("{file}:{line}: {msg}")]
    Data { file: String, line: usize, msg: String },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn data(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Data { file: file.into(), line, msg: msg.into() }
    }
}
