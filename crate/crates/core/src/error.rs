use thiserror::Error;

/// Every failure the toolkit can report.
///
/// `code()` gives a stable machine-readable tag, used by the CLI's JSON error output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not a prime")]
    InvalidPrime(u64),
    #[error("no valuation recorded for term `{0}`")]
    MissingValuation(String),
    #[error("lifted points project to a lower-dimensional set")]
    DegenerateLift,
    #[error("points do not span the ambient space")]
    DegeneratePoints,
    #[error("cone contains a line")]
    ConeNotPointed,
    #[error("lattice spanned by the given vectors is not saturated")]
    NotSaturated,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("marked points {0} and {1} coincide")]
    CoincidentMarkedPoints(usize, usize),
    #[error("distances violate the four-point condition at leaves {0:?}")]
    NotTreeMetric([usize; 4]),
    #[error("need at least four leaves, found {0}")]
    TooFewLeaves(usize),
    #[error("graph is not connected")]
    NotConnected,
    #[error("genus {0} is not supported here")]
    UnsupportedGenus(u64),
    #[error("dimension {found} exceeds the supported maximum {max}")]
    UnsupportedDimension { found: usize, max: usize },
    #[error("Newton polygon is degenerate")]
    DegenerateNewtonPolygon,
    #[error("tropical curve is not certified faithful")]
    NotCertified,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("hyperplane arrangement is not simple unimodular: {0}")]
    NotSimpleUnimodular(String),
    #[error("secondary cone is not generated by rank-one forms")]
    UnsupportedConeShape,
    #[error("no strictly positive edge lengths solve the system")]
    NoPositiveSolution,
    #[error("Delaunay search exceeded {0} cells")]
    TooManyCells(usize),
    #[error("vertex {vertex} has weight {weight}, which is not a triangular number")]
    NotTriangularWeight { vertex: usize, weight: u64 },
    #[error("{edges} edges between vertices {a} and {b} exceed the budget {budget}")]
    TooManyEdges { a: usize, b: usize, edges: usize, budget: u64 },
    #[error("weight-zero vertex {0} has degree below three")]
    NotStableGraph(usize),
    #[error("edge {0} is a loop, which the construction does not support")]
    LoopEdge(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Stable identifier for programmatic consumers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidPrime(_) => "invalid_prime",
            Error::MissingValuation(_) => "missing_valuation",
            Error::DegenerateLift => "degenerate_lift",
            Error::DegeneratePoints => "degenerate_points",
            Error::ConeNotPointed => "cone_not_pointed",
            Error::NotSaturated => "not_saturated",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::CoincidentMarkedPoints(..) => "coincident_marked_points",
            Error::NotTreeMetric(_) => "not_tree_metric",
            Error::TooFewLeaves(_) => "too_few_leaves",
            Error::NotConnected => "not_connected",
            Error::UnsupportedGenus(_) => "unsupported_genus",
            Error::UnsupportedDimension { .. } => "unsupported_dimension",
            Error::DegenerateNewtonPolygon => "degenerate_newton_polygon",
            Error::NotCertified => "not_certified",
            Error::NotPsd => "not_psd",
            Error::NotSymmetric => "not_symmetric",
            Error::NotSimpleUnimodular(_) => "not_simple_unimodular",
            Error::UnsupportedConeShape => "unsupported_cone_shape",
            Error::NoPositiveSolution => "no_positive_solution",
            Error::TooManyCells(_) => "too_many_cells",
            Error::NotTriangularWeight { .. } => "not_triangular_weight",
            Error::TooManyEdges { .. } => "too_many_edges",
            Error::NotStableGraph(_) => "not_stable_graph",
            Error::LoopEdge(_) => "loop_edge",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
