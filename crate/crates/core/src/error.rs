use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {value} at vertex {vertex} is outside the open interval (0,1)")]
    BorderProbability { vertex: usize, value: f64 },

    #[error("expected {expected} per-vertex probabilities, got {got}")]
    ProbabilityLength { expected: usize, got: usize },

    #[error("edge {index} is invalid: {reason}")]
    BadEdge { index: usize, reason: String },

    #[error("edges {first} and {second} are identical")]
    DuplicateEdge { first: usize, second: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("members do not share a common uniformity")]
    MixedUniformity,

    #[error("family members {first} and {second} are isomorphic")]
    IsomorphicDuplicates { first: usize, second: usize },

    #[error("invalid family member: {0}")]
    InvalidMember(String),

    #[error("r-density undefined for member {member}: it has fewer than two edges")]
    UndefinedDensity { member: usize },

    #[error("cluster count exceeded the budget of {budget}; partial counts {partial:?}")]
    Overflow { budget: u64, partial: Vec<u64> },

    #[error("instance too large for exhaustive enumeration: {size} > {max}")]
    TooLarge { size: usize, max: usize },

    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("complex has {vertices} vertices; canonical labelling supports at most 16")]
    TooManyVertices { vertices: usize },

    #[error("more than {budget} isomorphism types")]
    TypeExplosion { budget: usize },

    #[error("closed forms are only available for r = 3, got r = {r}")]
    UnsupportedR { r: usize },

    #[error("members {members:?} do not induce a connected subgraph of the dependency graph")]
    NotConnected { members: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by a cap or budget rather than invalid input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::TooLarge { .. }
                | Error::CapExceeded { .. }
                | Error::TooManyVertices { .. }
                | Error::TypeExplosion { .. }
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BorderProbability { .. } => "BorderProbability",
            Error::ProbabilityLength { .. } => "ProbabilityLength",
            Error::BadEdge { .. } => "BadEdge",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::Parse { .. } => "Parse",
            Error::MixedUniformity => "MixedUniformity",
            Error::IsomorphicDuplicates { .. } => "IsomorphicDuplicates",
            Error::InvalidMember(_) => "InvalidMember",
            Error::UndefinedDensity { .. } => "UndefinedDensity",
            Error::Overflow { .. } => "Overflow",
            Error::TooLarge { .. } => "TooLarge",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::TooManyVertices { .. } => "TooManyVertices",
            Error::TypeExplosion { .. } => "TypeExplosion",
            Error::UnsupportedR { .. } => "UnsupportedR",
            Error::NotConnected { .. } => "NotConnected",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
