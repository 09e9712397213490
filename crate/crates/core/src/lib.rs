//! Tropical roots of Laurent series via Newton polygons, and the eigenvalue
//! localization and contour-quadrature results they feed.

pub mod cli;
pub mod error;
pub mod localization;
pub mod polygon;
pub mod quadrature;
pub mod series;
pub mod update;
pub mod validation;

pub use error::{Error, Result};
