use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use ranslice::Execution;
use ranslice_cli::presets::{preset, preset_names};
use ranslice_cli::{run_experiment, write_outputs, ExperimentSpec};

#[derive(Parser)]
#[command(name = "ranslice", version, about = "RAN slicing equilibrium simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML file or a bundled preset.
    Run {
        /// Experiment spec file.
        config: Option<PathBuf>,
        /// Bundled preset instead of a file (see `ranslice presets`).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Base seed; trial t uses seed + t.
        #[arg(long)]
        seed: Option<u64>,
        /// Repetitions per grid point.
        #[arg(long)]
        reps: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run trials on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// List bundled presets.
    Presets,
    /// Print a preset's spec as TOML.
    Show { preset: String },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, preset: name, seed, reps, out, sequential } => {
            let mut spec = match (config, name) {
                (Some(path), None) => ExperimentSpec::load(&path)?,
                (None, Some(name)) => preset(&name)?,
                _ => bail!("give either a spec file or --preset"),
            };
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            if let Some(reps) = reps {
                spec.repetitions = reps;
            }
            spec.validate()?;
            let dir = out.or_else(|| spec.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
            let exec = if sequential { Execution::Sequential } else { Execution::default() };
            let outcome = run_experiment(&spec, exec)?;
            let nonconverged: usize = outcome.table.rows.iter().map(|r| r.nonconverged).sum();
            if nonconverged > 0 {
                eprintln!("warning: {nonconverged} trial(s) hit an iteration cap; see the nonconverged column");
            }
            for path in write_outputs(&spec, &outcome, &dir)? {
                println!("{}", path.display());
            }
        }
        Command::Presets => {
            for name in preset_names() {
                let spec = preset(name)?;
                println!("{name:<6} {:<20} reps={}", spec.kind.name(), spec.repetitions);
            }
        }
        Command::Show { preset: name } => print!("{}", preset(&name)?.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
