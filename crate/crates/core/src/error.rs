use std::path::PathBuf;

/// Errors produced anywhere in the extraction, simulation and I/O stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("disjoint traces")]
    DisjointTraces,
    #[error("zero variance")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("undersampled simulation: sim_step {sim_step} s exceeds {max_step} s")]
    UndersampledSimulation { sim_step: f64, max_step: f64 },
    #[error("time {t} s outside trace support [{start}, {end}]")]
    OutsideSupport { t: f64, start: f64, end: f64 },
    #[error("expansion diverges: bias {bias} must exceed amplitude {amplitude} > 0")]
    ExpansionDiverges { amplitude: f64, bias: f64 },
    #[error("empty event stream")]
    EmptyStream,
    #[error("signal too short: {duration} s available, {needed} s needed")]
    TooShort { duration: f64, needed: f64 },
    #[error("band [{lo}, {hi}] Hz exceeds Nyquist {nyquist} Hz")]
    BandExceedsNyquist { lo: f64, hi: f64, nyquist: f64 },
    #[error("degenerate alias: flicker {flicker} Hz folds to {alias} Hz at {fps} fps")]
    DegenerateAlias { flicker: f64, fps: f64, alias: f64 },
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
