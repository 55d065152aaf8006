//! Command implementations and file formats behind the `pedscan` binary.

pub mod args;
pub mod cmd;
pub mod error;
pub mod imageio;
pub mod model_file;
pub mod util;

use std::io::Write;

use args::Command;
use error::CliResult;

pub fn run(command: &Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Prepare(a) => cmd::prepare::run(a, out),
        Command::Train(a) => cmd::train::run(a, out),
        Command::Detect(a) => cmd::detect::run(a, out),
        Command::Eval(a) => cmd::eval::run(a, out),
        Command::Bench(a) => cmd::bench::run(a, out),
        Command::Synth(a) => cmd::synth::run(a, out),
    }
}
