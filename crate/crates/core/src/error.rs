use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: size {size} exceeds cap {cap}")]
    SizeCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("degenerate restriction: v(X \\ O) = 0")]
    DegenerateRestriction,

    #[error("construction infeasible at cell {cell} ({mask}): best band value {best} exceeds budget {budget}")]
    ConstructionInfeasible {
        cell: usize,
        mask: String,
        budget: f64,
        best: f64,
    },

    #[error("construction bound violated at {stage}: {value} > {bound}")]
    ConstructionBound {
        stage: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("search cap exceeded: {vertices} conflict vertices (cap {cap}); use greedy_removal instead")]
    SearchCap { vertices: usize, cap: usize },

    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
