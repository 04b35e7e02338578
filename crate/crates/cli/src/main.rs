use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use improv_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = BufWriter::new(io::stdout().lock());
    let mut err = io::stderr();
    let result = run(cli, &mut input, &mut out, &mut err);
    let flushed = out.flush();
    match result {
        Ok(outcome) if flushed.is_ok() => ExitCode::from(outcome.exit_code()),
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            ExitCode::from(1)
        }
    }
}
