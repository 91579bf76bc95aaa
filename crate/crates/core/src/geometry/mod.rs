//! Feasible sets, membership, projection and nested sequences.

mod nested;
mod point;
mod polygon;
mod project;
mod set;

pub use nested::{NestedSequence, NestingReport, NestingViolation};
pub use point::Point;
pub use polygon::Polygon;
pub use project::{dykstra, proj_tol, project, DYKSTRA_MAX_SWEEPS};
pub use set::{ConvexSet, Halfspace};
