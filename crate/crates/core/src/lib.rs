//! Numerical convex projective geometry: Hilbert metrics, singular limits of
//! projective maps, horospheres, asymptotic cones, and the quasi-homogeneous
//! convex domains of dimension at most four.

pub mod asymptotic;
pub mod catalog;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod formats;
pub mod hilbert;
pub mod linalg;
pub mod optimize;
pub mod orbit;
pub mod output;
pub mod projective;
pub mod sampling;

pub use error::{Error, Result};
