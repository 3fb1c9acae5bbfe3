//! Experiment runner for uplink Poisson cellular networks.
//!
//! Builds on `uplink-core` to produce the SINR CCDF, rate, scheduling-gain,
//! validity and user-count tables as CSV, running Monte Carlo trials in
//! parallel with results independent of the thread count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod driver;
mod error;
pub mod experiment;
pub mod grid;
pub mod table;

pub use error::CliError;
pub use experiment::{run, Command, Engine, ExperimentSpec};
pub use table::{Table, Value};
