use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degenerate cat state: z = 0 collapses both branches onto |0,N>")]
    DegenerateCat,

    #[error("vanishing mean spin (|<J>| = {0:e}); no squeezing frame exists")]
    NoMeanSpin(f64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("oracle limited to N <= {max}, got N = {n}")]
    OracleScale { n: usize, max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fit needs at least {needed} valid points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Validation(_)
            | Error::InvalidDimension(_)
            | Error::DimensionMismatch { .. }
            | Error::DegenerateCat
            | Error::Unsupported(_)
            | Error::OracleScale { .. }
            | Error::InsufficientPoints { .. } => 2,
            Error::NoMeanSpin(_) | Error::Numerical(_) => 3,
            Error::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
