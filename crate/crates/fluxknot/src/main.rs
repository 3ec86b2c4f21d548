use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fluxknot::commands::{execute, Command, RunOptions};

#[derive(Parser)]
#[command(name = "fluxknot", version, about = "Invariants and fiber fluxes of measured flows on thickened tori")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form invariants of every profile.
    Invariants,
    /// Monte Carlo fiber fluxes and convergence tables.
    Flux,
    /// Helicity sweep over the sine family.
    Sweep,
    /// Extend two boundary jets to a Lutz pair and sample it.
    Sew,
    /// Run the acceptance suite.
    Verify {
        /// Mutation check: single-panel quadrature at this tolerance for the closed-form checks.
        #[arg(long)]
        quad_tol: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, quad_tol) = match cli.command {
        Cmd::Invariants => (Command::Invariants, None),
        Cmd::Flux => (Command::Flux, None),
        Cmd::Sweep => (Command::Sweep, None),
        Cmd::Sew => (Command::Sew, None),
        Cmd::Verify { quad_tol } => (Command::Verify, quad_tol),
    };
    let opts = RunOptions { out: cli.out, seed: cli.seed, threads: cli.threads, quad_tol };
    match execute(&command, cli.config.as_deref(), &opts) {
        Ok((outcome, dir)) => {
            for line in &outcome.messages {
                println!("{line}");
            }
            println!("wrote {} file(s) to {}", outcome.artifacts.len(), dir.display());
            match outcome.failure {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
