use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },
    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),
    #[error("empty signal")]
    EmptySignal,
    #[error("invalid signal: {0}")]
    InvalidSignal(String),
    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid multi-frame: {0}")]
    InvalidMultiFrame(String),
    #[error("invalid transform parameters: {0}")]
    InvalidTransform(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("entropy order must be finite and non-negative, got {0}")]
    InvalidOrder(f64),
    #[error("degenerate segment: no energy in the evaluated region")]
    DegenerateSegment,
    #[error("invalid segment plan: {0}")]
    InvalidPlan(String),
    #[error("incompatible dimensions: {0}")]
    Incompatible(String),
    #[error("not a frame over this span: window energy vanishes at sample {sample}")]
    NotAFrame { sample: usize },
    #[error("coverage violated: no retained frame covers sample {sample}")]
    Coverage { sample: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
