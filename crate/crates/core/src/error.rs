use thiserror::Error;

/// Errors produced by every module of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a valid state: {0}")]
    NotAState(String),

    #[error("state is not pure: Bloch norm {0}")]
    NotPure(f64),

    #[error("vector is not of unit norm: {0}")]
    NotUnitVector(f64),

    #[error("combination has vanishing norm {0:e}")]
    ZeroVector(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("probability out of range: {0}")]
    OutOfRange(String),

    #[error("missing joint-probability table for setting {0}")]
    MissingTable(String),

    #[error("corpus contains no tokens")]
    EmptyCorpus,

    #[error("spectrum has too few levels: need {needed}, got {found}")]
    TooFewLevels { needed: usize, found: usize },

    #[error("only one occupied level, two constraints cannot pin two parameters")]
    Underdetermined,

    #[error("no feasible parameters: {0}")]
    Infeasible(String),

    #[error("root finding did not converge: {0}")]
    NonConvergence(String),

    #[error("exclusion violated: {n} entities cannot occupy {k} states one per state")]
    ExclusionViolated { n: u64, k: u64 },

    #[error("layout points {0} and {1} coincide")]
    LayoutOverlap(String, String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence(_) | Error::Infeasible(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
