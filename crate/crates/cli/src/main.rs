use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::RunConfig;
use error::Result;
use output::Run;

#[derive(Parser)]
#[command(name = "qergo", version, about = "Quantum-ergodicity experiments on large graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config, or a manifest.json from an earlier run to replay it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the master seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs serially. Results do not depend on it.
    #[arg(long, global = true, env = "QERGO_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample a random regular graph and potential.
    Gen,
    /// Exact identity battery over a randomized instance matrix.
    Identities,
    /// Quantum variance versus size.
    Ergodicity,
    /// Empirical spectral measure against the tree.
    BsCheck,
    /// The variance protocol with disorder.
    Anderson,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Identities => "identities",
            Command::Ergodicity => "ergodicity",
            Command::BsCheck => "bs-check",
            Command::Anderson => "anderson",
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| error::CliError::Config(e.to_string()))?;
    }
    let name = cli.command.name();
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("qergo-{name}-{}", cfg.seed)));
    let mut run = Run::create(&dir, name, &cfg, rayon::current_num_threads())?;
    match cli.command {
        Command::Gen => commands::gen(&cfg, &mut run)?,
        Command::Identities => commands::identities(&cfg, &mut run)?,
        Command::Ergodicity => commands::ergodicity(&cfg, &cfg.ergodicity, &mut run)?,
        Command::Anderson => commands::ergodicity(&cfg, &cfg.anderson, &mut run)?,
        Command::BsCheck => commands::bs_check(&cfg, &mut run)?,
    }
    run.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
