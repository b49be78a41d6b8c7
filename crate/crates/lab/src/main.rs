use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qppo_lab::compare::compare;
use qppo_lab::config::ExperimentConfig;
use qppo_lab::runner::run_experiment;
use qppo_lab::sweep::{parse_sweep_values, sweep};
use qppo_lab::{Result, DEFAULT_OUTPUT_ROOT, OUTPUT_ROOT_VAR};

#[derive(Parser)]
#[command(
    name = "qppo-lab",
    version,
    about = "Train and compare quantum and classical PPO agents"
)]
struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = OUTPUT_ROOT_VAR, default_value = DEFAULT_OUTPUT_ROOT)]
    output_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train every seed of an experiment config.
    Run {
        /// Experiment config (TOML).
        config: PathBuf,
    },
    /// Overlay finished runs and write a summary table.
    Compare {
        /// Run directories written by `run`.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        /// Output directory; defaults to `<output-root>/comparison`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a config once per value of a dotted parameter, e.g. `hyper.scaling_lr`.
    Sweep {
        /// Base experiment config.
        config: PathBuf,
        /// Dotted key to vary.
        #[arg(long)]
        param: String,
        /// Comma-separated TOML values.
        #[arg(long)]
        values: String,
    },
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let exp = ExperimentConfig::from_file(&config)?.resolve(&cli.output_root)?;
            let out = run_experiment(&exp)?;
            println!(
                "{}: {}/{} seeds completed, artifacts in {}",
                exp.name,
                out.manifest.completed(),
                exp.seeds.len(),
                out.dir.display()
            );
        }
        Command::Compare { runs, output } => {
            let out = output.unwrap_or_else(|| cli.output_root.join("comparison"));
            for row in compare(&runs, &out)? {
                println!(
                    "{}\tfinal {:.4} ± {:.4}\tauc {:.4}",
                    row.label, row.final_mean, row.final_std, row.auc
                );
            }
            println!("summary in {}", out.display());
        }
        Command::Sweep { config, param, values } => {
            let values = parse_sweep_values(&values)?;
            let out = sweep(&config, &param, &values, &cli.output_root)?;
            println!(
                "{} variants, comparison in {}",
                out.runs.len(),
                out.comparison_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
