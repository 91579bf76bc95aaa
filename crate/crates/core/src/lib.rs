//! Online convex optimization over nested evolving feasible sets.

pub mod algorithms;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod instances;
pub mod objectives;
pub mod oracle;
pub mod rng;
pub mod solvers;
pub mod verify;

pub use error::{ConesError, Result};
