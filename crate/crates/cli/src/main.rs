//! `abtransfer`: command-line driver for the AB-phase transfer simulator.

mod commands;
mod config;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, RunConfig};

const AFTER_HELP: &str = "\
Units are natural (hbar = 1): beta and omega are angular frequencies, t is time.
Exit status: 0 success, 2 configuration error, 3 numeric-invariant failure.";

#[derive(Debug, Parser)]
#[command(name = "abtransfer", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Fock-space cutoff, overriding the configuration.
    #[arg(long, global = true)]
    cutoff: Option<usize>,
    /// Seed for randomized inputs.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-phase transfer: interaction and spin readout followed by the cat gate.
    Transfer,
    /// Projection pattern over a phase grid.
    Sweep,
    /// Bit string to AB-phase sequence.
    Encode {
        /// Bits to encode; random (see --seed) when neither this nor the
        /// configuration provides them.
        bits: Option<String>,
    },
    /// AB-phase sequence (JSON array) back to bits.
    Decode {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Register fidelity after whole storage periods.
    Storage,
    /// λ₀(t) trajectories and final-regime density checks.
    Dissipate,
    /// Closed-form versus oracle comparison records.
    Report,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Invariant(m) => write!(f, "numeric invariant failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<abtransfer::Error> for CliError {
    fn from(e: abtransfer::Error) -> Self {
        use abtransfer::Error as E;
        match e {
            E::InvalidCutoff(_)
            | E::InvalidParameter { .. }
            | E::TruncationInsufficient { .. }
            | E::MalformedBits(_)
            | E::SubThresholdPhase(_)
            | E::DegeneratePeriod(_)
            | E::NotQuasiOrthogonal(_)
            | E::RegisterMismatch(_) => CliError::Config(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.cutoff.is_some() {
        cfg.cutoff = cli.cutoff;
    }
    cfg.validate()?;
    let format = cli.format.or(cfg.format).unwrap_or(Format::Csv);
    let out = cli.out.clone().or_else(|| cfg.output.clone());

    let result = match &cli.command {
        Command::Transfer => commands::transfer(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Encode { bits } => commands::encode(&cfg, bits.as_deref(), cli.seed),
        Command::Decode { input } => commands::decode(&cfg, input.as_deref()),
        Command::Storage => commands::storage(&cfg),
        Command::Dissipate => commands::dissipate(&cfg),
        Command::Report => commands::report(&cfg),
    }?;

    let text = result.output.render(format);
    match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    if result.violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(result.violations.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abtransfer: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
