use thiserror::Error;

use crate::model::ConfigError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("population extinct")]
    Extinct,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("plot rendering failed: {0}")]
    Plot(String),
    #[error("nothing to plot")]
    NoResults,
}

impl SimError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
