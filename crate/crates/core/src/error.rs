use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single problem found while ingesting one dialog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub dialog: String,
    pub field: String,
    pub reason: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "dialog `{}`: field `{}`: {}", self.dialog, self.field, self.reason)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate fact id `{0}`")]
    DuplicateFact(String),
    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),
    #[error("unknown fact id `{0}`")]
    UnknownFact(String),
    #[error("fact `{id}` is invalid: {reason}")]
    InvalidFact { id: String, reason: String },
    #[error("{}", format_diagnostics(.0))]
    Schema(Vec<Diagnostic>),
    #[error("unknown adapter `{0}` (expected `canonical` or `released`)")]
    UnknownAdapter(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("fact scoring needs at least one candidate")]
    NoCandidates,
    #[error("used fact `{0}` was not shown in the fact bank")]
    UsedNotShown(String),
    #[error("relevant fact `{0}` is missing from the ranking")]
    RelevantNotRanked(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("unknown paraphrase label `{0}`")]
    UnknownLabel(String),
    #[error("checkpoint mismatch: {0}")]
    CheckpointMismatch(String),
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },
    #[error("{path}: line {line}: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot read {path}: {source}")]
    ReadFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    let mut out = format!("{} schema violation(s)", diags.len());
    for d in diags {
        out.push_str("\n  ");
        out.push_str(&d.to_string());
    }
    out
}

impl Error {
    pub(crate) fn schema(dialog: impl Into<String>, field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema(vec![Diagnostic {
            dialog: dialog.into(),
            field: field.into(),
            reason: reason.into(),
        }])
    }

    /// True for errors caused by bad input data rather than runtime failure.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::DuplicateFact(_)
                | Error::DuplicateEntity(_)
                | Error::UnknownFact(_)
                | Error::InvalidFact { .. }
                | Error::Schema(_)
                | Error::UnknownAdapter(_)
                | Error::UsedNotShown(_)
                | Error::RelevantNotRanked(_)
                | Error::UnknownLabel(_)
                | Error::Parse { .. }
                | Error::ReadFile { .. }
                | Error::Json(_)
                | Error::Toml(_)
                | Error::CheckpointMismatch(_)
        )
    }
}
