use clap::Parser;
use scslab_cli::args::Cli;
use scslab_cli::run;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cfg = match Cli::parse().into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(env) => {
            for p in &env.outputs {
                println!("wrote {}", p.display());
            }
            for ph in &env.timings {
                println!("phase {} {:.3}s", ph.name, ph.seconds);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, scslab_cli::RunError::Config(_)) { 2 } else { 1 })
        }
    }
}
