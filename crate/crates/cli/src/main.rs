// Comparisons are written as `!(a <= b)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.config.parallel { 0 } else { 1 };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };

    // Output is fully built before anything is written, so a failing command
    // leaves no partial result behind.
    match pool.install(|| commands::run(&cli.command, &cli.config)) {
        Ok(emit) => {
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &emit.text),
                None => std::io::stdout().lock().write_all(emit.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(emit.status)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.status)
        }
    }
}
