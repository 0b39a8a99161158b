//! Finite-dimensional Euclidean Jordan algebras and order isomorphisms
//! between their symmetric cones.

pub mod acceptance;
pub mod algebra;
pub mod error;
pub mod operator;
pub mod par;
pub mod sampling;
pub mod spectral;

pub use algebra::{inner_product, jordan_product, triple_product, AlgebraDescriptor, Element, FactorDescriptor};
pub use error::{Error, Result};
pub use operator::{multiplication_operator, quadratic_rep, LinearOperator, MatrixFile};
pub mod order_maps;
pub mod structure;
pub mod verify;
