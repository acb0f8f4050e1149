use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown config key '{0}'")]
    UnknownKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column '{column}': {message}")]
    Schema {
        path: PathBuf,
        /// 1-based data row (the header is row 0).
        row: usize,
        column: String,
        message: String,
    },

    #[error("plot '{plot}': {message}")]
    Plot { plot: String, message: String },

    #[error(transparent)]
    Compute(#[from] spinres::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use spinres::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config-parse",
            CliError::UnknownKey(_) => "unknown-key",
            CliError::Io { .. } => "file-io",
            CliError::Schema { .. } => "schema-mismatch",
            CliError::Plot { .. } => "missing-series",
            CliError::Compute(e) => match e {
                E::InvalidGeometry(_) => "invalid-geometry",
                E::Domain(_) => "domain",
                E::GuardZone { .. } => "guard-zone",
                E::EmptyWindow => "empty-window",
                E::DegenerateField(_) => "degenerate-field",
                E::InvalidTrace(_) => "invalid-trace",
                E::InsufficientSpan(_) => "insufficient-span",
                E::FitFailed { .. } => "fit-failed",
                E::RejectedFit(_) => "rejected-fit",
                E::DegenerateData(_) => "degenerate-data",
                E::NotBracketed { .. } => "not-bracketed",
                E::NonOverlapping => "non-overlapping",
                E::ZeroDetuning => "zero-detuning",
            },
        }
    }

    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::UnknownKey(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Schema { .. } => 4,
            CliError::Plot { .. } | CliError::Compute(_) => 5,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({
            "code": self.code(),
            "message": self.to_string(),
        });
        if let CliError::Schema { row, column, .. } = self {
            body["row"] = json!(row);
            body["column"] = json!(column);
        }
        json!({ "error": body })
    }
}
