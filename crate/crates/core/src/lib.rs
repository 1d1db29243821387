//! Surfaces in three-dimensional hyperbolic and de Sitter space: fundamental
//! forms, Gauss maps, polar duality, a Weierstrass-type representation and a
//! catalogue of surfaces with conformal fourth fundamental form.

pub mod ambient;
pub mod calculus;
pub mod duality;
pub mod error;
pub mod forms;
pub mod gaussmaps;
pub mod linalg;
pub mod weierstrass;
pub mod zoo;

pub use error::{Error, Result};
