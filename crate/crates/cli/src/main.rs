use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use fsc_core::config::RunConfig;
use fsc_core::{oracle, report, PauliSum};

#[derive(Parser)]
#[command(name = "fsc", version, about = "Transition matrix elements from frame superposition clusters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a config file and write the tables.
    Run {
        config: PathBuf,
        /// Output directory; overrides `[run] output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optimizer seed; overrides `[optimizer] seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact spectrum of a Hamiltonian file with (N, Sz, S²) labels.
    Oracle { hamiltonian: PathBuf },
    /// Check a config and its fixtures without running anything.
    Validate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<RunConfig> {
    let mut config = RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(out) = out {
        config.output = out;
    }
    if let Some(seed) = seed {
        config.optimizer.seed = seed;
    }
    Ok(config)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every stage converged.
fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let config = load(&config, out, seed)?;
            let report = report::run(&config)?;
            for f in &report.files {
                println!("wrote {}", report.output.join(f).display());
            }
            for stage in &report.summary.unconverged {
                eprintln!("unconverged: {stage}");
            }
            Ok(report.summary.converged)
        }
        Command::Validate { config, out, seed } => {
            let config = load(&config, out, seed)?;
            let fixture = report::validate(&config)?;
            let methods: Vec<String> = config.methods.iter().map(|m| m.to_string()).collect();
            println!(
                "ok: {} qubits, {} states, methods {}",
                fixture.num_qubits(),
                config.targets.len(),
                methods.join(", ")
            );
            Ok(true)
        }
        Command::Oracle { hamiltonian } => {
            let h = PauliSum::read(&hamiltonian).with_context(|| format!("reading {}", hamiltonian.display()))?;
            let spectrum = oracle::diagonalize(&h)?;
            println!("{:>4}  {:>22}  {:>8}  {:>8}  {:>8}", "#", "energy", "N", "Sz", "S2");
            for (i, e) in spectrum.eigenvalues.iter().enumerate() {
                match spectrum.labels[i] {
                    Some(l) => println!(
                        "{i:>4}  {e:>22.15}  {:>8.4}  {:>8.4}  {:>8.4}",
                        l.number, l.sz, l.s2
                    ),
                    None => println!("{i:>4}  {e:>22.15}"),
                }
            }
            Ok(true)
        }
    }
}
