//! Independent checks: a brute-force hull, argument-principle counts and
//! Newton refinement of actual zeros, and a report validator built on them.

mod function;
mod hull;
mod winding;

pub use function::{ArgumentSource, ComplexCoeff, ScalarFunction};
pub use hull::{brute_hull, BRUTE_HULL_CAP};
pub use winding::{count_near, count_zeros_minus_poles, refine_roots, MAX_WINDING_NODES};
mod report;
pub use report::{validate_report, Mismatch, ValidationSummary};
