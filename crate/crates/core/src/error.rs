use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate filter: all coefficients are zero")]
    DegenerateFilter,

    #[error("N must be even (got N={0})")]
    OddFilterCount(usize),

    #[error("N must be at least {min} (two filters per center frequency, {n_center} center frequencies), got N={n}")]
    TooFewFilters {
        n: usize,
        min: usize,
        n_center: usize,
    },

    #[error("filter length must be at least one sample (duration {duration_s} s at {sample_rate} Hz)")]
    FilterTooShort { duration_s: f64, sample_rate: u32 },

    #[error("signal too short: {len} samples, need at least {min}")]
    SignalTooShort { len: usize, min: usize },

    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(u32, u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative mask entry {value} at filter {row}, frame {col}")]
    NegativeMask { row: usize, col: usize, value: f64 },

    #[error("coefficient matrix is rank deficient (smallest singular value {smallest:e}, largest {largest:e})")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("signal has zero power")]
    ZeroPower,

    #[error("length mismatch: {0} vs {1} samples")]
    LengthMismatch(usize, usize),

    #[error("unsupported wav format: {0}")]
    UnsupportedFormat(String),

    #[error("sample {value} at index {index} is outside [-1, 1]; enable peak normalization to write it")]
    SampleOutOfRange { index: usize, value: f64 },

    #[error("invalid filterbank: {0}")]
    InvalidBank(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
