use std::path::PathBuf;

/// Errors produced by graph construction, simulation, analysis and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "no connected random geometric graph after {attempts} draws (n = {n}, d = {d}); \
         the scaling factor is probably too small for this node count"
    )]
    Disconnected { n: usize, d: f64, attempts: usize },

    #[error("graph is not connected")]
    NotConnected,

    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("node {node} has degree {degree}, above the enumeration cap of {cap}")]
    DegreeCapExceeded { node: usize, degree: usize, cap: usize },

    #[error("matrix is not symmetric (|w[{row}][{col}] - w[{col}][{row}]| = {gap:e})")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("trace set mixes configurations: {0}")]
    MixedTraces(String),

    #[error("unknown algorithm `{0}` (expected randomized, greedy or sample_greedy)")]
    UnknownAlgorithm(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// 2 for configuration and input errors, 3 for connectivity failures,
    /// 4 for I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Disconnected { .. } | Error::NotConnected => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "activation probability must lie in [0, 1], got {p}"
        )))
    }
}
