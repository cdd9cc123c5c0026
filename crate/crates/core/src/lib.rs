//! Numerical toolkit for sharp affine isoperimetric inequalities in
//! dimensions 2 and 3.
//!
//! The library builds L_p moment and centroid bodies of star bodies and of
//! integrable densities, computes polar volumes, locates Santaló-type
//! optimal centers (including the L_p center of mass of a density defined
//! through the double-polar moment body), and evaluates the associated
//! sharp volume-product inequalities against their exact constants.
//!
//! Directions and points live in `R³`; dimension-2 objects use the `z = 0`
//! plane. All quadrature is deterministic for a fixed grid, and Monte
//! Carlo routines in [`oracle`] are seeded explicitly.

// Negated float comparisons such as `!(x > 0.0)` are deliberate: unlike
// `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod error;
pub mod inequalities;
pub mod library;
pub mod lp_bodies;
pub mod oracle;
pub mod quadrature;
pub mod santalo;

pub use error::{Error, Result};
pub use quadrature::{sphere_grid, Density, DirectionGrid, Lambda};

/// Point or direction; dimension-2 data keeps `z = 0`.
pub type Vector = nalgebra::Vector3<f64>;
/// Linear map; dimension-2 maps embed as block-diagonal with `m33 = 1`.
pub type Matrix = nalgebra::Matrix3<f64>;

/// Shorthand for a dimension-2 vector embedded in the `z = 0` plane.
pub fn vec2(x: f64, y: f64) -> Vector {
    Vector::new(x, y, 0.0)
}

/// Shorthand for a dimension-3 vector.
pub fn vec3(x: f64, y: f64, z: f64) -> Vector {
    Vector::new(x, y, z)
}
