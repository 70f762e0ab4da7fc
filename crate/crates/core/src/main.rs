use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shrinking_projection::cli::{cmd_check, cmd_run, Format, Suite};

/// Shrinking projection experiments in finite-dimensional lp spaces.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    ///
    /// Exit status: 0 converged, 2 stopped at max_outer, 1 on error.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Trace destination; overrides `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `output.format`.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check randomized invariants of one module.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Include a deliberately inadmissible map (factor 1.2).
        #[arg(long)]
        broken_fixture: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Info)
        .init();
    let code = match Args::parse().command {
        Command::Run {
            config,
            out,
            format,
        } => cmd_run(&config, out.as_deref(), format),
        Command::Check {
            suite,
            seed,
            samples,
            broken_fixture,
        } => cmd_check(suite, seed, samples, broken_fixture),
    };
    ExitCode::from(code as u8)
}
