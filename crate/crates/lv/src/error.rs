use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LvError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {message}")]
    Parse { source_name: String, line: usize, message: String },
    #[error("model file: {0}")]
    Model(String),
    #[error("tagset mismatch: model was trained with tagset {expected:016x}, got {found:016x}")]
    TagsetMismatch { expected: u64, found: u64 },
    #[error("{0}")]
    Usage(String),
    #[error("oracle disagreement on sentence {sentence}: decoder {decoder}, oracle {oracle}")]
    OracleMismatch { sentence: usize, decoder: String, oracle: String },
    #[error(transparent)]
    Core(#[from] lv_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LvError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> LvError {
        LvError::Io { path: path.into(), source }
    }

    /// `2` for bad input or usage, `1` for failures during computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            LvError::Io { .. } | LvError::Parse { .. } | LvError::Model(_) | LvError::Usage(_) => 2,
            LvError::TagsetMismatch { .. } => 2,
            LvError::OracleMismatch { .. } | LvError::Core(_) | LvError::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = LvError> = std::result::Result<T, E>;
