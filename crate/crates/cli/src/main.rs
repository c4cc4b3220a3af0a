use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use conjugacy_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = run(&cli);
    eprint!("{}", out.stderr);
    if !out.stdout.is_empty() {
        let written = match &cli.output {
            Some(path) => std::fs::write(path, &out.stdout),
            None => std::io::stdout().write_all(out.stdout.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(out.code as u8)
}
