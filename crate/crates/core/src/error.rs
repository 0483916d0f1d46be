use thiserror::Error;

use crate::complex::{Face, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("facet list is empty")]
    NoFacets,
    #[error("empty facet in input")]
    EmptyFacet,
    #[error("face {0} lists a vertex twice")]
    DuplicateVertex(Face),
    #[error("vertex {0} is listed but lies in no facet")]
    GhostVertex(VertexId),
    #[error("face {0} is not in the complex")]
    FaceNotInComplex(Face),
    #[error("complex is not balanced: {reason}")]
    NotBalanced { reason: String, witness: Vec<VertexId> },
    #[error("coloring is improper on edge {0}")]
    ColoringImproper(Face),
    #[error("coloring does not cover vertex {0}")]
    ColoringIncomplete(VertexId),
    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),
    #[error("flag table over {0} multidegrees exceeds the default budget; pass allow_large")]
    TooLarge(usize),
    #[error("complex is not a homology manifold over {0}")]
    NotAManifold(String),
    #[error("{0} is not a facet")]
    NotAFacet(Face),
    #[error("vertex labels of the two summands collide")]
    LabelCollision,
    #[error("bijection is not color-preserving at vertex {0}")]
    ColorMismatch(VertexId),
    #[error("bijection is not admissible: links of {v} and {w} share face {witness}")]
    NotAdmissible {
        v: VertexId,
        w: VertexId,
        witness: Face,
    },
    #[error("invalid bijection: {0}")]
    InvalidBijection(String),
    #[error("sampling budget exhausted after {steps} completed steps")]
    BudgetExhausted { steps: usize, partial: Box<crate::constructions::WalkupTrace> },
    #[error("no linear system of parameters found over {field} after {attempts} attempts")]
    LsopNotFound { field: String, attempts: usize },
    #[error("linear forms are not a system of parameters (facet {0} restriction is singular)")]
    NotAnLsop(Face),
    #[error("unknown builtin complex `{0}`")]
    UnknownBuiltin(String),
    #[error("invalid field `{0}`")]
    InvalidField(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
