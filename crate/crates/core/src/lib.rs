//! Exact and heuristic solvers for joint routing-assignment: items are
//! assigned one-to-one to placeholders while a minimum-length cycle
//! alternating between items and placeholders is chosen.

pub mod bench;
pub mod bnb;
pub mod error;
pub mod greedy;
pub mod instance;
pub mod model;
pub mod mps;
pub mod plot;
pub mod shaking;
pub mod simplex;
pub mod solution;

pub use error::{Error, Result};
