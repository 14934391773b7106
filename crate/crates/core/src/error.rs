use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("corpus contains no documents")]
    EmptyCorpus,

    #[error("duplicate document id `{0}`")]
    DuplicateId(String),

    #[error("document `{id}`: invalid date `{value}`")]
    InvalidDate { id: String, value: String },

    #[error("document `{id}`: {message}")]
    InvalidDocument { id: String, message: String },

    #[error("document `{id}` dated {date} falls outside the binning span")]
    OutOfSpan { id: String, date: String },

    #[error("framework: {0}")]
    Framework(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("synthetic spec: {0}")]
    Synth(String),

    /// A precondition that the pipeline itself guarantees was violated.
    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage, source: Box::new(e) },
        }
    }

    /// Process exit code: 1 for input problems, 2 for internal consistency failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Consistency(_) => 2,
            _ => 1,
        }
    }
}
