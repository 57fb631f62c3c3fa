//! Maximal weights, boundary actions and Kempf–Ness flows for Hamiltonian
//! actions of compact matrix groups on Kähler model spaces.
//!
//! The numeric kernel ([`matcore`], [`symspace`]) is generic over the real
//! scalar type; the scene, weight and stability layers work in `f64` through
//! the aliases below.

pub mod error;
pub mod exact;
pub mod matcore;
pub mod random;
pub mod scalar;
pub mod scenes;
pub mod stability;
pub mod symspace;
pub mod tolerance;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerance::Tolerances;

/// Double-precision aliases used by the scene, weight and stability layers.
pub type Matrix = matcore::ComplexMatrix<f64>;
pub type Skew = matcore::SkewHermitian<f64>;
pub type Group = matcore::GroupElement<f64>;
pub type Cartan = matcore::CartanPair<f64>;
pub type Boundary = symspace::BoundaryPoint<f64>;
pub type Complex = num_complex::Complex<f64>;
