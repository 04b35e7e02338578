//! Library side of the `improv` command: instance loading, sampling
//! engines, empirical reports and the command implementations.

pub mod commands;
pub mod engine;
pub mod instance;
pub mod report;

pub use commands::{run, Cli, Outcome};
