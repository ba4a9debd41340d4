use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const HYPOTHESIS_NOT_MET: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("column {0:?} not found in the header")]
    MissingColumn(String),
    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    ParseError { row: usize, column: String, value: String },
    #[error("group {group:?} has {n} observations; at least {required} are needed")]
    TooFewObservations { group: String, n: usize, required: usize },
    #[error("{0}")]
    Input(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("pair ({a}, {b}): {source}")]
    Pair {
        a: String,
        b: String,
        #[source]
        source: extropy::Error,
    },
    #[error(transparent)]
    Numerical(#[from] extropy::Error),
    #[error("checks failed: {}", .0.join(", "))]
    ChecksFailed(Vec<String>),
    #[error("declared hypotheses not met on the grid: {}", .0.join(", "))]
    HypothesisNotMet(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use extropy::Error as E;
        match self {
            CliError::Numerical(e) | CliError::Pair { source: e, .. } => match e {
                E::InvalidParameter(_) | E::InvalidGrid(_) | E::InsufficientGrid { .. } | E::InvalidSample(_) => {
                    exit::INPUT
                }
                _ => exit::NUMERICAL,
            },
            CliError::ChecksFailed(_) => exit::NUMERICAL,
            CliError::HypothesisNotMet(_) => exit::HYPOTHESIS_NOT_MET,
            _ => exit::INPUT,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
