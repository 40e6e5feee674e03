use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use saddlesim::{field_map_file, run_file, RunError, RunOptions, RunSummary};

#[derive(Parser)]
#[command(name = "saddlesim", version, about = "Levitated particle in a rotating saddle trap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML (or JSON) config.
    Run {
        config: PathBuf,
        /// Worker threads (default: machine parallelism).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output directory; SADDLESIM_OUT takes precedence.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed, overriding the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the focal-plane intensity for each I_L of a config's sweep.
    FieldMap {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative mode phase θ [rad], overriding the config.
        #[arg(long)]
        theta: Option<f64>,
    },
}

fn report(result: Result<RunSummary, RunError>) -> ExitCode {
    match result {
        Ok(s) => {
            println!(
                "{}: wrote {} files to {} in {:.2} s",
                s.scenario,
                s.files.len(),
                s.out_dir.display(),
                s.wall_time_s
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1 like config errors; 2 is reserved for
    // physicality failures.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Run {
            config,
            threads,
            out,
            seed,
        } => report(run_file(&config, &RunOptions { threads, out, seed })),
        Command::FieldMap { config, out, theta } => report(field_map_file(
            &config,
            &RunOptions {
                out,
                ..RunOptions::default()
            },
            theta,
        )),
    }
}
