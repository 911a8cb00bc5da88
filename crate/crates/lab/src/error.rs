use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// A configuration key violated its constraint.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown builtin scenario `{0}` (try `doa-lab list`)")]
    NotFound(String),

    #[error("numeric failure: {0}")]
    Numeric(doa_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        LabError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Map a core domain error onto the config key it came from.
    pub(crate) fn from_core(prefix: &str, err: doa_core::Error) -> Self {
        match err {
            doa_core::Error::Domain { param, reason } => {
                let key = if prefix.is_empty() || prefix == param {
                    param.to_string()
                } else {
                    format!("{prefix}.{param}")
                };
                LabError::Config { key, reason }
            }
            other => LabError::Numeric(other),
        }
    }

    /// Process exit status for the command line.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config { .. } | LabError::Json(_) | LabError::NotFound(_) => 2,
            LabError::Numeric(_) => 3,
            LabError::Io { .. } => 1,
        }
    }
}
