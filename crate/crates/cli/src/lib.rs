//! The `splatfuse` command-line pipeline:
//! `synth` -> `backproject` -> `opjpo` -> `render` -> `metrics`.
//!
//! Every JSON document carries `schema_version: 1`. Exit codes: 0 on success,
//! 1 when a computation fails (degenerate geometry, no tool placed), 2 for
//! usage and I/O errors, including inputs whose image sizes disagree.
//!
//! Point clouds on disk are in world coordinates; the camera JSON's `pose`
//! (camera-to-world, identity when absent) relates them to the masks.

pub mod args;
pub mod commands;
mod error;

pub use args::{Cli, Command};
pub use error::{CliError, Result};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Backproject(a) => commands::backproject(a).map(drop),
        Command::Opjpo(a) => commands::opjpo(a).map(drop),
        Command::Render(a) => commands::render(a).map(drop),
        Command::Metrics(a) => commands::metrics(a).map(drop),
        Command::Synth(a) => commands::synth(a).map(drop),
    }
}
