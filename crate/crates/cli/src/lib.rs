//! Command-line front end: argument parsing, CSV and plot-series output, and
//! the subcommand runner behind the `heston-stab` binary.
//!
//! Exit codes: 0 when every executed check holds, 1 when a check fails, 2
//! for usage, validation or I/O errors, 3 for numerical failures.

pub mod args;
pub mod output;
pub mod run;

pub use args::{Command, RunConfig};
pub use output::{emit_plot_data, write_csv, write_csv_file, CsvRecord};
pub use run::{run, CliError, Status};
