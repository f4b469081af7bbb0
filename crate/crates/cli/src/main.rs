use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ricci_lab::lab::{self, LabConfig, Outcome, EXIT_FAIL};

/// Checks Einstein-type structures on radial warped products.
#[derive(Parser)]
#[command(name = "ricci-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Golden-value check of a named example.
    VerifyExample {
        /// schwarzschild_exterior, schwarzschild_interior, sphere_family,
        /// flat_family or hyperbolic_family
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Identity residual suite on a configured structure.
    Identities {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Integrate one trajectory and classify it.
    Integrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Integrate one trajectory per parameter value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: Option<&Path>) -> Result<LabConfig, Outcome> {
    match path {
        None => Ok(LabConfig::default()),
        Some(p) => LabConfig::load(p).map_err(|e| Outcome::from_error(&e)),
    }
}

fn run(cli: Cli) -> Outcome {
    let env_tol = match lab::env_tolerance() {
        Ok(t) => t,
        Err(e) => return Outcome::from_error(&e),
    };
    let result = match &cli.command {
        Command::VerifyExample { name, config, out } => {
            load(config.as_deref()).map(|c| lab::cmd_verify_example(name, &c, env_tol, out))
        }
        Command::Identities { config, out } => load(Some(config)).map(|c| lab::cmd_identities(&c, env_tol, out)),
        Command::Integrate { config, out } => load(Some(config)).map(|c| lab::cmd_integrate(&c, out)),
        Command::Sweep { config, out } => load(Some(config)).map(|c| lab::cmd_sweep(&c, out)),
    };
    result.unwrap_or_else(|o| o)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|_| Outcome {
        code: EXIT_FAIL,
        lines: vec!["error: internal failure".into()],
        files: Vec::new(),
    });
    for line in &outcome.lines {
        if outcome.code != 0 && line.starts_with("error:") {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    ExitCode::from(outcome.code as u8)
}
