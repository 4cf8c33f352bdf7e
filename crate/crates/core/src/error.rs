use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Lebesgue exponent must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("shell {q} is empty on this grid (q_max = {q_max})")]
    ShellOutOfRange { q: i32, q_max: i32 },

    #[error("interval [{start}, {end}] leaves the series range [{first}, {last}]")]
    IntervalOutOfRange {
        start: f64,
        end: f64,
        first: f64,
        last: f64,
    },

    #[error(
        "only {found} samples in [{start}, {end}]; at least {required} needed \
         (sample spacing must be <= {max_spacing:e})"
    )]
    InsufficientSamples {
        start: f64,
        end: f64,
        found: usize,
        required: usize,
        max_spacing: f64,
    },

    #[error("temporal resolution too coarse: sample spacing {spacing:e} > required {required:e}")]
    InsufficientResolution { spacing: f64, required: f64 },

    #[error("CFL violation at t = {t}: dt = {dt:e} exceeds limit {limit:e}")]
    Cfl { t: f64, dt: f64, limit: f64 },

    #[error("blow-up or instability detected; last valid time t = {last_valid_time}")]
    BlowUp { last_valid_time: f64 },

    #[error("{path}:{line}: {msg}")]
    Format {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("malformed data: {0}")]
    Data(String),

    #[error("hash mismatch for {path}: manifest says {expected}, file has {actual}")]
    HashMismatch {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 usage, 3 data format, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Cfl { .. } | Error::BlowUp { .. } => 4,
            Error::Format { .. }
            | Error::IntervalOutOfRange { .. }
            | Error::InsufficientSamples { .. }
            | Error::InsufficientResolution { .. }
            | Error::Data(_)
            | Error::HashMismatch { .. }
            | Error::Io(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn format(path: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
