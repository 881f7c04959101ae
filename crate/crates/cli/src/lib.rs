//! Library side of the `tnet` command-line tool: one function per
//! subcommand plus the benchmark grid runner.

pub mod bench;
pub mod commands;
pub mod error;
pub mod method;

pub use bench::{run_grid, BenchGrid, BenchRecord};
pub use commands::{compute, ComputeParams, Computation};
pub use error::CliError;
pub use method::Method;
