//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("edge set is empty")]
    EmptyEdgeSet,

    #[error("partition at vertex {vertex} does not cover labels 0..{degree}: {detail}")]
    InvalidPartition {
        vertex: usize,
        degree: usize,
        detail: String,
    },

    #[error("polygon supports overlap at index {index}")]
    OverlappingSupports { index: usize },

    #[error("vertex {vertex} is not covered by any polygon")]
    UncoveredVertex { vertex: usize },

    #[error("vector {index} is not unit norm (norm = {norm})")]
    NonUnitVector { index: usize, norm: f64 },

    #[error("not a (partial) orthogonal reflection: {detail}")]
    NotReflection { detail: String },

    #[error("polygon {polygon} is not a clique: vertices {u} and {v} are not adjacent")]
    NotAClique { polygon: usize, u: usize, v: usize },

    #[error("coin at vertex {vertex} is not an orthogonal reflection: {detail}")]
    CoinNotOrthogonalReflection { vertex: usize, detail: String },

    #[error("conversion hypothesis violated at index {index}: {detail}")]
    HypothesisViolated { index: usize, detail: String },

    #[error("tessellation union does not cover the graph: {detail}")]
    CoverageViolation { detail: String },

    #[error("tessellations share an edge: {{{u}, {v}}} is covered by both")]
    TessellationsShareEdge { u: usize, v: usize },

    #[error("polygons {alpha} (first tessellation) and {beta} (second) intersect in more than one vertex")]
    PolygonIntersectionTooLarge { alpha: usize, beta: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("row {row} of {matrix} sums to {sum}, expected 1")]
    RowNotStochastic {
        matrix: &'static str,
        row: usize,
        sum: f64,
    },

    #[error("weight at ({x}, {y}) is positive but ({x}, {y}) is not an edge")]
    WeightOffEdge { x: usize, y: usize },

    #[error("basis map is not injective: index {index} repeats pair ({x}, {y})")]
    MapNotInjective { index: usize, x: usize, y: usize },

    #[error("coin block at vertex {vertex} is {got}x{got}, expected {expected}x{expected}")]
    CoinSizeMismatch {
        vertex: usize,
        expected: usize,
        got: usize,
    },

    #[error("block at vertex {vertex} is not unitary (residual = {residual})")]
    NonUnitaryBlock { vertex: usize, residual: f64 },

    #[error("state norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("loops are not supported here: edge {edge} is a loop")]
    LoopNotSupported { edge: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI's JSON error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::VertexOutOfRange { .. } => "VertexOutOfRange",
            Error::EmptyEdgeSet => "EmptyEdgeSet",
            Error::InvalidPartition { .. } => "InvalidPartition",
            Error::OverlappingSupports { .. } => "OverlappingSupports",
            Error::UncoveredVertex { .. } => "UncoveredVertex",
            Error::NonUnitVector { .. } => "NonUnitVector",
            Error::NotReflection { .. } => "NotReflection",
            Error::NotAClique { .. } => "NotAClique",
            Error::CoinNotOrthogonalReflection { .. } => "CoinNotOrthogonalReflection",
            Error::HypothesisViolated { .. } => "HypothesisViolated",
            Error::CoverageViolation { .. } => "CoverageViolation",
            Error::TessellationsShareEdge { .. } => "TessellationsShareEdge",
            Error::PolygonIntersectionTooLarge { .. } => "PolygonIntersectionTooLarge",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::RowNotStochastic { .. } => "RowNotStochastic",
            Error::WeightOffEdge { .. } => "WeightOffEdge",
            Error::MapNotInjective { .. } => "MapNotInjective",
            Error::CoinSizeMismatch { .. } => "CoinSizeMismatch",
            Error::NonUnitaryBlock { .. } => "NonUnitaryBlock",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::EmptyMarkedSet => "EmptyMarkedSet",
            Error::LoopNotSupported { .. } => "LoopNotSupported",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// The vertex/row/polygon index that triggered the error, when one exists.
    pub fn index(&self) -> Option<usize> {
        match self {
            Error::VertexOutOfRange { vertex, .. } => Some(*vertex),
            Error::InvalidPartition { vertex, .. } => Some(*vertex),
            Error::OverlappingSupports { index } => Some(*index),
            Error::UncoveredVertex { vertex } => Some(*vertex),
            Error::NonUnitVector { index, .. } => Some(*index),
            Error::CoinNotOrthogonalReflection { vertex, .. } => Some(*vertex),
            Error::HypothesisViolated { index, .. } => Some(*index),
            Error::RowNotStochastic { row, .. } => Some(*row),
            Error::MapNotInjective { index, .. } => Some(*index),
            Error::CoinSizeMismatch { vertex, .. } => Some(*vertex),
            Error::NonUnitaryBlock { vertex, .. } => Some(*vertex),
            Error::LoopNotSupported { edge } => Some(*edge),
            _ => None,
        }
    }
}
