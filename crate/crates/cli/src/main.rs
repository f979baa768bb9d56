use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use syncgrid::harness::{self, ExperimentConfig};
use syncgrid::{Error, Result};

/// Synchronized Predator-Prey experiments: training, exact MST verification
/// and episode playback.
#[derive(Debug, Parser)]
#[command(name = "syncgrid", version)]
struct Cli {
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base preset; overrides `preset` from the config.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train every configured seed and write metrics, checkpoints and a summary.
    Run { config: Option<PathBuf> },
    /// Train with an explicit seed list.
    Sweep {
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
    },
    /// Check the MST conditions exactly and print a JSON verdict.
    Verify { config: Option<PathBuf> },
    /// Play one greedy episode from a checkpoint directory.
    Render {
        checkpoint: PathBuf,
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the built-in presets.
    Presets,
}

fn load(cli: &Cli, config: Option<&Path>) -> Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::load(path, cli.preset.as_deref())?,
        None => match &cli.preset {
            Some(name) => ExperimentConfig::preset(name)?,
            None => return Err(Error::Config("give a config file or --preset".into())),
        },
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(io::stdout(), "{text}")?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => print_json(&harness::run(&load(cli, config.as_deref())?)?),
        Command::Sweep { config, seeds } => {
            print_json(&harness::sweep(&load(cli, config.as_deref())?, seeds)?)
        }
        Command::Verify { config } => print_json(&harness::verify(&load(cli, config.as_deref())?)?),
        Command::Render {
            checkpoint,
            config,
            seed,
        } => {
            let cfg = load(cli, config.as_deref())?;
            std::fs::create_dir_all(&cfg.out_dir)?;
            let trace_path = cfg.out_dir.join(format!("trace_seed{seed}.jsonl"));
            let mut trace = BufWriter::new(File::create(&trace_path)?);
            let stdout = io::stdout();
            let mut frames = stdout.lock();
            harness::render(checkpoint, &cfg, *seed, &mut frames, &mut trace)?;
            trace.flush()?;
            writeln!(frames, "trace written to {}", trace_path.display())?;
            Ok(())
        }
        Command::Presets => {
            for name in harness::PRESETS {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("syncgrid: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
