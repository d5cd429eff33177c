//! The `rainshape` command line: subcommands wiring the library pipeline
//! end-to-end with deterministic, file-based outputs.

pub mod args;
pub mod commands;
pub mod failure;
pub mod manifest;
pub mod svg;

pub use args::{Cli, Command, PipelineConfig};
pub use failure::Failure;

/// Runs one parsed invocation. Configuration is validated before any input
/// is touched, so an invalid config never leaves partial outputs behind.
pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Extract(a) => commands::extract::run(a),
        Command::Fpca(a) => commands::fpca::run(a),
        Command::Fourier(a) => commands::fourier::run(a),
        Command::Report(a) => commands::report::run(a),
        Command::Synth(a) => commands::synth::run(a),
    }
}
