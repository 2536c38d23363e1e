use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration needs {needed} states but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("graph is not regular: vertex {vertex} has degree {found}, expected {expected}")]
    IrregularGraph {
        vertex: usize,
        found: String,
        expected: String,
    },

    #[error("graph has no edges of positive weight")]
    ZeroDegree,

    #[error("vertex set must be a nonempty proper subset")]
    EmptyOrFullSet,

    #[error("delta * n = {0} is not an integer")]
    NonIntegralDeltaN(String),

    #[error("block count k = {k} does not divide R = {r}")]
    KNotDividingR { k: usize, r: usize },

    #[error("bisection impossible: {0}")]
    OddUniverse(String),

    #[error("delta = {delta} outside [{lo}, {hi}]")]
    DeltaOutOfWindow { delta: String, lo: String, hi: String },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("common denominator {needed} exceeds bound {bound}")]
    DenominatorTooLarge { needed: String, bound: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config: {0}")]
    Config(String),

    #[error("integer overflow while scaling weights")]
    Overflow,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
