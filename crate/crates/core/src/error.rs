use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("sup-norm violation: |Q| = {value} must be < 1 (at {location})")]
    SupNorm { value: f64, location: String },

    #[error("symmetry violation: Q[{row}][{col}] = {upper} but Q[{col}][{row}] = {lower}")]
    Symmetry {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("resource limit: {what} = {requested} exceeds cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("positivity violation: Gram operator at level {level} has smallest eigenvalue {min_eigenvalue}")]
    PositivityViolation { level: usize, min_eigenvalue: f64 },

    #[error("truncation-inexact: mass dropped above level {n_max}")]
    TruncationInexact { n_max: usize },

    #[error("truncation too small: need n_max >= {required}, have {n_max}")]
    TruncationTooSmall { required: usize, n_max: usize },
}
