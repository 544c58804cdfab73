//! Exact arithmetic foundation: rationals, valuations, matrices, lattices, hulls and cones.

pub mod cone;
pub mod hull;
pub mod lattice;
pub mod matrix;
pub mod rational;
pub mod valuation;

pub use cone::{extreme_rays, PolyhedralCone};
pub use hull::{face_lattice, facets, lower_hull, triangulate, AffineFunctional, Facet, LowerFacet};
pub use lattice::{
    closest_vectors, find_isometry, hermite_unimodular_complete, integer_kernel, lattice_points_in_ellipsoid,
    lll_reduce,
};
pub use matrix::{IntMatrix, Matrix, PsdStatus, RatMatrix};
pub use rational::{format_rational, parse_rational, ExtRational, Integer, Rational};
pub use valuation::{valuate, valuate_term, Valuation};
