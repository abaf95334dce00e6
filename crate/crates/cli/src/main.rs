use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinaddr_cli::commands::{cmd_plan, cmd_sweep, drive_report, swap_report, write_atomically};
use spinaddr_cli::{CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "spinaddr", version, about = "Single-qubit addressing in a globally driven spin-qubit array")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat JSON config; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file (overrides `output_path` for `sweep`; reports go to
    /// stdout unless this is given).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// `mc_mean` or `paper_weighted` (overrides `estimator`).
    #[arg(long, global = true)]
    estimator: Option<String>,

    /// Worker threads for the Monte Carlo; 0 uses every core. Output does
    /// not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Average sequence and simple-pulse fidelities for every N, as CSV.
    Sweep,
    /// Schedule and bookkeeping for one array.
    Plan {
        /// Target site (0-based).
        #[arg(long, default_value_t = 0)]
        target: usize,
        /// Array length when sampling.
        #[arg(long, default_value_t = 6)]
        qubits: usize,
        /// Use the built-in six-qubit example array instead of sampling.
        #[arg(long)]
        fixture_table1: bool,
    },
    /// Drive strength, step time and idle fidelities.
    Drive,
    /// SWAP synthesis for one exchange link.
    Swap,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(e) = &cli.estimator {
        cfg.estimator = e.clone();
    }
    if let Some(o) = &cli.out {
        cfg.output_path = o.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => write_atomically(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Sweep => {
            let summary = cmd_sweep(&cfg, &cfg.output(), cli.workers)?;
            eprint!("{summary}");
            Ok(())
        }
        Command::Plan {
            target,
            qubits,
            fixture_table1,
        } => {
            if *qubits < 2 {
                return Err(CliError::Config {
                    field: "qubits".into(),
                    reason: "must be at least 2".into(),
                });
            }
            emit(cli, &cmd_plan(&cfg, *target, *qubits, *fixture_table1)?)
        }
        Command::Drive => emit(cli, &drive_report(&cfg)?.to_string()),
        Command::Swap => emit(cli, &swap_report(&cfg)?.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
