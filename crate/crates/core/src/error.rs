use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not connected")]
    NotConnected,
    #[error("collapse of loop is not a homotopy equivalence")]
    LoopCollapse,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("morphism is not combinatorial")]
    NotCombinatorial,
    #[error("precovers have different targets")]
    TargetMismatch,
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("refused: {0}")]
    Refused(String),
    #[error("preset data unavailable: {0}")]
    Unavailable(String),
    #[error("wrong graph-of-graphs shape: {0}")]
    Shape(String),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
