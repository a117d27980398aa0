pub mod cli;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod fixtures;
pub mod graph;
pub mod oracle;
pub mod parallel;
pub mod planner;
pub mod query;
pub mod table;
pub mod theory;

pub use error::{Error, Result};
