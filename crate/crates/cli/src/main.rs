use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use triphoton_cli::presets::{preset, preset_json, preset_names};
use triphoton_cli::{report_rate, run, sweep, CliError, ConfigError, RunConfig, RunSummary, SweepParameter};

#[derive(Parser)]
#[command(name = "triphoton", version, about = "Triphoton spectral separability and detection")]
struct Cli {
    /// Worker threads for parallel kernels and sweeps (default: all cores).
    #[arg(long, global = true, env = "TRIPHOTON_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the JSA, analyse it and write all exports.
    Run {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Use a shipped preset instead of a config file.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// κ over a list of parameter values.
    Sweep {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// pump_sigma (σ/σ_PM), pump_lambda (nm) or pulse_duration (s);
        /// defaults to the config's sweep section.
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shipped configurations.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
    /// Triplets per second from a run summary.
    Rate {
        #[arg(long)]
        summary: PathBuf,
        /// Pump repetition rate, Hz.
        #[arg(long)]
        rep_rate: f64,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    Show { name: String },
}

fn load(config: Option<PathBuf>, preset_name: Option<String>) -> Result<(RunConfig, PathBuf), CliError> {
    match (config, preset_name) {
        (Some(path), _) => {
            let cfg = RunConfig::from_file(&path)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((cfg, base))
        }
        (None, Some(name)) => Ok((preset(&name)?, PathBuf::from("."))),
        (None, None) => Err(ConfigError::new("$", "no config given").into()),
    }
}

fn output_dir(cfg: &RunConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&triphoton_cli::config_hash(cfg)[..12]))
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config, preset, out } => {
            let (cfg, base) = load(config, preset)?;
            let dir = output_dir(&cfg, out);
            let summary = run(&cfg, &base, &dir)?;
            log::info!("wrote {} files to {}", summary.files.len(), dir.display());
        }
        Command::Sweep {
            config,
            preset,
            param,
            values,
            out,
        } => {
            let (cfg, base) = load(config, preset)?;
            let parameter = match (&param, &cfg.sweep) {
                (Some(p), _) => SweepParameter::parse(p)?,
                (None, Some(s)) => s.parameter,
                (None, None) => return Err(ConfigError::new("sweep.parameter", "not given").into()),
            };
            let values = match (values, &cfg.sweep) {
                (Some(v), _) => v,
                (None, Some(s)) => s.values.clone(),
                (None, None) => return Err(ConfigError::new("sweep.values", "not given").into()),
            };
            let table = sweep(&cfg, &base, parameter, &values)?;
            let dir = output_dir(&cfg, out);
            table.write(&dir)?;
            if let Some(best) = table.argmin() {
                log::info!("minimum kappa {:.6} at {} = {:e}", best.kappa.unwrap(), parameter.name(), best.value);
            }
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in preset_names() {
                    println!("{name}");
                }
            }
            PresetAction::Show { name } => match preset_json(&name) {
                Some(text) => print!("{text}"),
                None => return Err(ConfigError::new("$", format!("no preset named {name:?}")).into()),
            },
        },
        Command::Rate { summary, rep_rate } => {
            let text = std::fs::read_to_string(&summary)?;
            let s = RunSummary::from_json(&text)
                .map_err(|e| ConfigError::new("summary", e.to_string()))?;
            if !(rep_rate >= 0.0 && rep_rate.is_finite()) {
                return Err(ConfigError::new("rep_rate", "must be non-negative").into());
            }
            println!("{:e}", report_rate(s.epsilon_sq, rep_rate));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
