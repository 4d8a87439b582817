use std::fmt;

/// Phase of a job in which a failure surfaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Split,
    Map,
    Reduce,
    Merge,
    Io,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Split => "split",
            Phase::Map => "map",
            Phase::Reduce => "reduce",
            Phase::Merge => "merge",
            Phase::Io => "io",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("key {key} outside container range [{lo}, {hi}]")]
    KeyRange { key: u64, lo: u64, hi: u64 },

    /// A buffered flush hit an out-of-range key; `index` is the offending buffer slot.
    #[error("key {key} outside container range [{lo}, {hi}] at buffer index {index}")]
    KeyRangeAt {
        key: u64,
        lo: u64,
        hi: u64,
        index: usize,
    },

    #[error("byte-string key emitted into an integer-keyed container")]
    KeyKind,

    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),

    #[error("string {index} contains an interior zero byte")]
    InteriorZero { index: usize },

    #[error("pipeline protocol violation: {0}")]
    PipelineProtocol(String),

    #[error("{phase} phase failed: {message}")]
    Job { phase: Phase, message: String },

    #[error("{phase} phase I/O failure: {source}")]
    Io {
        phase: Phase,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn worker_panic(phase: Phase) -> Self {
        Error::Job {
            phase,
            message: "worker panicked".into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
