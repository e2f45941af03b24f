//! Generalized l^p solid-angle sums over real polytopes.
//!
//! Solid-angle weighted lattice sums are evaluated two ways: directly, by
//! enumerating lattice points and measuring their solid angles, and in
//! transform space, by damped Poisson summation over vertex tangent cones.
//! The crate also checks the reciprocity and Brion-type identities that
//! relate the two.

pub mod cli;
pub mod cone;
pub mod error;
pub mod expr;
pub mod extrapolate;
pub mod lattice_sum;
pub mod linalg;
pub mod macdonald;
pub mod oracle;
pub mod polytope;
pub mod quadrature;
pub mod region;
pub mod report;
pub mod solid_angle;
pub mod transforms;

pub use cone::{triangulate_cone, Cone, SimpleCone};
pub use error::{Error, Result};
pub use polytope::{faces, lattice_points, load_polytope, vertex_tangent_cone, Face, Polytope};
pub use region::{HalfSpace, Membership, Region};
