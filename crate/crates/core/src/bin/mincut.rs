use std::process::ExitCode;

use clap::Parser;
use mincut::cli::{run, Cli, RunConfig, PROFILE_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env = std::env::var(PROFILE_ENV).ok();
    let result = RunConfig::from_cli(cli, env.as_deref()).and_then(|cfg| {
        let out = run(&cfg)?;
        match &cfg.output {
            Some(p) => std::fs::write(p, out).map_err(|e| mincut::cli::CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                print!("{out}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mincut: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
