use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpticsError {
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("mode {0} listed more than once")]
    DuplicateMode(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("count overflow computing {0}")]
    Overflow(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration budget exceeded: {branches} branches > cap {cap}")]
    BudgetExceeded { branches: usize, cap: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no correction recorded for herald pattern {0}")]
    MissingCorrection(String),
}

pub type Result<T> = std::result::Result<T, OpticsError>;
