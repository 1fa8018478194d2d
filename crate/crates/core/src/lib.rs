//! Exact and numerical laboratory for the totally asymmetric simple
//! exclusion process with one slow bond.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod exact_solver;
pub mod model;
pub mod semi_infinite;
pub mod series_engine;
pub mod simulator;
pub mod tables;

pub use error::{Error, Result};
