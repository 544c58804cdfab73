//! Exact computation of tropical Jacobians.
//!
//! Curves enter as marked points on the projective line (hyperelliptic case) or as
//! plane polynomials over a valued field. They become weighted metric graphs, period
//! matrices, Delaunay and Voronoi decompositions and tropical theta divisors. The
//! Schottky module runs the other way, from a quadratic form back to a graph.
//!
//! All arithmetic is over arbitrary-precision rationals.

pub mod abel_jacobi;
pub mod admissible_cover;
pub mod delaunay;
pub mod error;
pub mod exact_math;
pub mod formats;
pub mod metric_graph;
pub mod period_matrix;
pub mod phylo;
pub mod plane_tropical;
pub mod realization;
pub mod schottky;

pub use abel_jacobi::{AbelJacobi, Divisor, GraphPoint};
pub use admissible_cover::{hyperelliptic_pipeline, Cover, HyperellipticResult};
pub use delaunay::{
    delaunay_subdivision, secondary_cone_of_form, theta, voronoi_cell, DelaunaySubdivision, ThetaValue, VoronoiCell,
};
pub use error::{Error, Result};
pub use exact_math::{ExtRational, IntMatrix, PolyhedralCone, RatMatrix, Rational, Valuation};
pub use metric_graph::{Edge, InfiniteEdge, WeightedMetricGraph};
pub use period_matrix::{cycle_basis, period_matrix, secondary_cone_of_graph, CycleBasis, QuadraticForm};
pub use phylo::{neighbor_joining, plucker_valuations, tree_metric, MarkedPoints, PhyloTree, TreeMetric};
pub use plane_tropical::{newton_subdivision, tropical_curve, PlaneCurveInput, PlaneTropicalCurve};
pub use realization::{realization_blueprint, Blueprint};
pub use schottky::{graph_catalog, schottky_recover, SchottkyOutcome, SchottkyRecovery};
