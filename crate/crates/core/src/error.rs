use thiserror::Error;

/// Errors raised while building or validating codes, kernels and schedules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("base matrix entry {value} at ({row}, {col}) is outside {{-1}} U [0, {z})")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: i64,
        z: usize,
    },
    #[error("invalid alphabet: {0}")]
    Alphabet(String),
    #[error("invalid framing LUT: {0}")]
    Lut(String),
    #[error("value {0} is not in the image of the framing function")]
    NotInImage(i32),
    #[error("code {0:#b} is not a valid framed message")]
    InvalidCode(u32),
    #[error("offset {theta} outside [1, {max}]")]
    Offset { theta: i32, max: i32 },
    #[error("rows per layer {rpl} does not divide {rows} base-matrix rows")]
    LayerSize { rpl: usize, rows: usize },
    #[error("layer {layer} overlaps in base-matrix column {col}")]
    LayerOverlap { layer: usize, col: usize },
    #[error("no cyclically non-overlapping row order exists")]
    NoPipelineOrder,
    #[error("schedule does not match code: {0}")]
    ScheduleMismatch(String),
    #[error("invalid kernel: {0}")]
    Kernel(String),
    #[error("invalid simulation plan: {0}")]
    Plan(String),
    #[error("code is not encodable: {0}")]
    Encoding(String),
    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
