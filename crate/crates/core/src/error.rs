use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: missing value in column `{column}`")]
    MissingValue { line: u64, column: String },

    #[error("line {line}: non-finite value in column `{column}`")]
    NonFinite { line: u64, column: String },

    #[error("label column `{column}` has more than two classes (saw `{first}`, `{second}` and `{third}`); filter to a binary subset first")]
    NotBinary {
        column: String,
        first: String,
        second: String,
        third: String,
    },

    #[error("column `{column}` is {actual}, expected {expected}")]
    WrongColumnKind {
        column: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("dataset has no labels")]
    Unlabeled,

    #[error("dataset has a single class; need both benign and attack rows")]
    SingleClass,

    #[error("class {label} has {count} rows, need at least {needed}")]
    ClassTooSmall {
        label: u8,
        count: usize,
        needed: usize,
    },

    #[error("minority class has {0} rows; SMOTE needs at least 2")]
    MinorityTooSmall(usize),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("column mismatch: {0}")]
    ColumnMismatch(String),

    #[error("empty dataset")]
    Empty,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// The innermost error, with stage wrappers peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.root(), Error::Numeric(_))
    }
}
