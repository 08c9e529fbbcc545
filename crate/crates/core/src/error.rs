use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown taxon `{0}`")]
    UnknownTaxon(String),
    #[error("taxon set is not feasible")]
    InfeasibleSet,
    #[error("set of {size} taxa exceeds the ordering guard of {limit}")]
    SetTooLarge { size: usize, limit: usize },
    #[error("schedule domain does not match the team windows: {0}")]
    DomainMismatch(String),
    #[error("instance with {n} taxa exceeds the brute-force guard of {limit}")]
    InstanceTooLarge { n: usize, limit: usize },
    #[error("search space of {size} assignments exceeds the guard of {limit}")]
    SearchSpaceTooLarge { size: f64, limit: f64 },
    #[error("diversity target D = {d} exceeds the mask limit of {limit}")]
    DTooLarge { d: u64, limit: u64 },
    #[error("diversity loss {dbar} exceeds the mask limit of {limit}")]
    DbarTooLarge { dbar: u64, limit: u64 },
    #[error("tree is not binary")]
    NonBinaryTree,
    #[error("tree is not a star")]
    NotAStar,
    #[error("state space of {states} entries exceeds the guard of {limit}")]
    StateSpaceTooLarge { states: f64, limit: f64 },
    #[error("knapsack bound {bound} exceeds the guard of {limit}")]
    BoundTooLarge { bound: u64, limit: u64 },
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("parse error at byte {offset}: {message}")]
    ParseError { offset: usize, message: String },
    #[error("branch length `{text}` at byte {offset} is not an integer")]
    NonIntegerWeight { offset: usize, text: String },
    #[error("leaf label `{0}` appears more than once")]
    DuplicateLeaf(String),
    #[error("solver produced a witness that failed verification: {0}")]
    WitnessRejected(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors raised because a configured size guard was exceeded.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::SetTooLarge { .. }
                | Error::InstanceTooLarge { .. }
                | Error::SearchSpaceTooLarge { .. }
                | Error::DTooLarge { .. }
                | Error::DbarTooLarge { .. }
                | Error::NonBinaryTree
                | Error::NotAStar
                | Error::StateSpaceTooLarge { .. }
                | Error::BoundTooLarge { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
