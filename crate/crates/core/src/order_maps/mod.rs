//! Order isomorphisms between symmetric cones: the linear factorization
//! `T = U_y J` and the classified (possibly non-linear) form.

mod demo;
mod form;
mod linear;
mod monotone;

pub use demo::{grid_algebra, grid_points, grid_power_demo};
pub use form::{affinity_on_translated_cone, random_order_iso, AffineRepresentation, EngagedMap, FormFile, OrderIsoForm};
pub use linear::{
    factorize_linear_order_iso, is_jordan_homomorphism, is_jordan_isomorphism, random_jordan_automorphism,
    random_jordan_isomorphism, HOMOMORPHISM_TOL, INTERIOR_TOL,
};
pub use monotone::MonotoneBijection;
