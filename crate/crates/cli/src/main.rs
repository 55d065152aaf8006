use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use pedscan::args::Cli;
use pedscan::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = pedscan::util::init_threads().and_then(|_| {
        let stdout = io::stdout();
        let mut out = BufWriter::new(stdout.lock());
        pedscan::run(&cli.command, &mut out)?;
        out.flush().map_err(CliError::from)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pedscan: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
