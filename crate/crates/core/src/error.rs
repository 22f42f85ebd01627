use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {0:?} belongs to no edge")]
    IsolatedVertex(String),
    #[error("edge refers to undeclared vertex {0:?}")]
    UnknownVertexInEdge(String),
    #[error("edge is empty")]
    EmptyEdge,
    #[error("vertex label {0:?} declared more than once")]
    DuplicateLabel(String),
    #[error("count must be at least 1")]
    ZeroCount,
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("model domain does not match the scenario's vertex set: {0}")]
    DomainMismatch(String),
    #[error("{what}: size {size} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        budget: usize,
    },
    #[error("generated {generated} edges, budget is {budget}")]
    SizeBudgetExceeded { generated: usize, budget: usize },
    #[error("scenario has no deterministic model")]
    NoDeterministicModels,
    #[error("scenario admits no probabilistic model")]
    EmptyModelSet,
    #[error("rule is not defined on exactly the questions of the product: {0}")]
    RuleDomainMismatch(String),
    #[error("winning set of question {0} is not contained in the question")]
    WinningSetNotSubset(String),
    #[error("weights do not form a probabilistic model of the scenario")]
    NotAModel,
    #[error("edge {0:?} is not binary")]
    NonBinaryEdge(Vec<String>),
    #[error("scenario is not connected")]
    Disconnected,
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("product labels collide on {0:?}")]
    LabelCollision(String),
    #[error("invalid product: {0}")]
    InvalidProduct(String),
    #[error("vertex {0:?} is not zero weighted")]
    NotZeroWeighted(String),
    #[error("vertex set {0:?} cannot be contracted")]
    NotContractible(Vec<String>),
    #[error("vertex set {0:?} is not a virtual edge")]
    NotVirtual(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IsolatedVertex(_) => "IsolatedVertex",
            Error::UnknownVertexInEdge(_) => "UnknownVertexInEdge",
            Error::EmptyEdge => "EmptyEdge",
            Error::DuplicateLabel(_) => "DuplicateLabel",
            Error::ZeroCount => "ZeroCount",
            Error::EmptySubset => "EmptySubset",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::DomainMismatch(_) => "DomainMismatch",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::SizeBudgetExceeded { .. } => "SizeBudgetExceeded",
            Error::NoDeterministicModels => "NoDeterministicModels",
            Error::EmptyModelSet => "EmptyModelSet",
            Error::RuleDomainMismatch(_) => "RuleDomainMismatch",
            Error::WinningSetNotSubset(_) => "WinningSetNotSubset",
            Error::NotAModel => "NotAModel",
            Error::NonBinaryEdge(_) => "NonBinaryEdge",
            Error::Disconnected => "Disconnected",
            Error::InvalidEmbedding(_) => "InvalidEmbedding",
            Error::LabelCollision(_) => "LabelCollision",
            Error::InvalidProduct(_) => "InvalidProduct",
            Error::NotZeroWeighted(_) => "NotZeroWeighted",
            Error::NotContractible(_) => "NotContractible",
            Error::NotVirtual(_) => "NotVirtual",
            Error::Parse(_) => "Parse",
            Error::FixtureMismatch(_) => "FixtureMismatch",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
