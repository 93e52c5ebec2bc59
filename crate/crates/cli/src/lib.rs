//! Command-line runner and static report generator.

mod cli;
pub mod report;
pub mod svg;

pub use cli::{run, SEED_ENV};
