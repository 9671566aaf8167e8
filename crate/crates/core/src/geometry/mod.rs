//! Piecewise-linear geometry on the probability simplex.

mod affine;
mod arrangement;
mod envelope;
mod hull;
pub(crate) mod linalg;
pub(crate) mod polytope;
mod pullback;
mod simplex;
mod triangulation;

pub use affine::{AffineFunctional, AffineMap};
pub use arrangement::CellArrangement;
pub use envelope::{argcav, concave_envelope};
pub use pullback::{pullback_affine, PullbackPiece, PulledBack};
pub use simplex::{dedup_points, SimplexPoint};
pub use triangulation::{validate_triangulation, SupportMeasure, Triangulation, TriangulationReport, VertexInterpolant};

pub(crate) use simplex::check_probability_vector;
