//! Benchmarking platform for continuous black-box optimizers.
//!
//! The experiment side ([`suite`], [`observer`], [`harness`]) produces
//! improvement logs; the assessment side ([`perf`]) turns them into
//! runtimes, simulated restarts, ECDFs and averages.

pub mod cfmt;
mod error;
pub mod harness;
pub mod observer;
pub mod perf;
pub mod rng;
pub mod suite;

pub use error::{Error, Result};
