use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ringsim_cli::config::{ConfigSources, Format, Mode, SweepConfig};
use ringsim_cli::error::{CliError, EXIT_CONFIG, EXIT_OK};

/// Ring-resonator sweeps and identity audits.
///
/// Parameters resolve in order: built-in defaults, then the `--config` file, then each
/// `--set key=value` in the order given. For `audit`, `--seed` and `--samples` apply last.
#[derive(Parser, Debug)]
#[command(name = "ringsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-bus transfer and noise power over a phase sweep.
    SingleBus(SweepArgs),
    /// Ring power transmission against the matched cavity Lorentzian.
    LangevinCompare(SweepArgs),
    /// Discrete beam-splitter attenuation against its continuum limit.
    AttenuationChain(SweepArgs),
    /// Add/drop powers, noise commutators and coincidence over a phase sweep.
    AddDrop(SweepArgs),
    /// Grid points with coincidence ratio at or below a threshold.
    HommGrid(SweepArgs),
    /// Coincidence ratio against phase for several loss values.
    CriticalDip(SweepArgs),
    /// One-photon-sector entropy level-set fractions or grid values.
    EntropyGrid(SweepArgs),
    /// Randomized check of every model identity; exits 2 on any failure.
    Audit(AuditArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Flat JSON file of parameter values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter override, repeatable; values parse as JSON, else as strings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Optional report file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

fn load(cli: Cli) -> Result<SweepConfig, CliError> {
    let (mode, args) = match cli.command {
        Command::Audit(a) => {
            let mut set = a.set;
            set.extend(a.seed.map(|s| format!("seed={s}")));
            set.extend(a.samples.map(|s| format!("samples={s}")));
            let format: Format = a.format.parse()?;
            let sources = ConfigSources { file: a.config.as_deref(), sets: &set, out: a.out, format };
            return SweepConfig::load(Mode::Audit, sources);
        }
        Command::SingleBus(a) => (Mode::SingleBus, a),
        Command::LangevinCompare(a) => (Mode::LangevinCompare, a),
        Command::AttenuationChain(a) => (Mode::AttenuationChain, a),
        Command::AddDrop(a) => (Mode::AddDrop, a),
        Command::HommGrid(a) => (Mode::HommGrid, a),
        Command::CriticalDip(a) => (Mode::CriticalDip, a),
        Command::EntropyGrid(a) => (Mode::EntropyGrid, a),
    };
    let format: Format = args.format.parse()?;
    let sources = ConfigSources { file: args.config.as_deref(), sets: &args.set, out: Some(args.out), format };
    SweepConfig::load(mode, sources)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { EXIT_OK as u8 });
        }
    };
    match load(cli).and_then(|cfg| ringsim_cli::run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ringsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
