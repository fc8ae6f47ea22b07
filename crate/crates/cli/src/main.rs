use clap::{Args, Parser, Subcommand};
use polgyro_cli::config::{ConfigError, RunConfig};
use polgyro_cli::sweep::{self, Axis};
use polgyro_cli::{analyze, metrology_cmd, presets, runner, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Driven-dissipative polariton condensate simulations and rotation-sensor
/// metrology.
#[derive(Debug, Parser)]
#[command(name = "polgyro", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Start from a named preset (see `presets`).
    #[arg(long, global = true, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Dotted-path assignment applied to the configuration, e.g. `params.g=0.5`.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Seed of the disordered potential.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation.
    Run,
    /// Run the Cartesian product of parameter axes.
    Sweep {
        /// `path[+path]=v1,v2,...`; repeatable. No axes means one run.
        #[arg(long = "axis")]
        axes: Vec<String>,
    },
    /// Compare rotation sensors; `--config` takes a file of `[[gyro]]` tables.
    Metrology {
        /// Also print each sensor's phase at this rotation rate (rad/s).
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Analyse saved snapshots.
    Analyze {
        #[arg(required = true)]
        snapshots: Vec<PathBuf>,
        /// Profile radius; defaults to the brightest ring.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        bins: Option<usize>,
        /// Comma-separated x-wavenumbers to report populations for.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        momenta: Vec<f64>,
        #[arg(long)]
        no_lobes: bool,
    },
    /// List presets, or print one as TOML.
    Presets { name: Option<String> },
}

fn load_config(g: &Global) -> Result<RunConfig, CliError> {
    let base = match (&g.config, &g.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => presets::preset(name).ok_or_else(|| ConfigError::UnknownPreset(name.clone()))?,
        (None, None) => RunConfig::default(),
    };
    let mut cfg = base.with_overrides(&g.overrides)?;
    if let Some(seed) = g.seed {
        if !cfg.set_random_seed(seed) {
            log::warn!("--seed ignored: the potential has no random component");
        }
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(n) = g.workers {
        if n == 0 {
            return Err(ConfigError::Invalid { field: "--workers".into(), message: "must be at least 1".into() }.into());
        }
        // a second initialisation only happens in tests; the first pool wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Run => {
            let cfg = load_config(g)?;
            let dir = g.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
            let outcome = runner::run(&cfg, &dir)?;
            let s = &outcome.summary;
            println!(
                "{}: t = {} after {} steps, norm = {:.6e}, steady = {} -> {}",
                s.name,
                s.final_state.t,
                s.steps,
                s.final_state.norm,
                s.steady_state,
                dir.display()
            );
            if let Some(l) = &s.final_state.lobes {
                println!("  lobes: {} at r = {:.3}, contrast {:.4}", l.count, l.radius, l.contrast);
            }
        }
        Command::Sweep { axes } => {
            let cfg = load_config(g)?;
            let axes = axes.iter().map(|a| Axis::parse(a)).collect::<Result<Vec<_>, _>>()?;
            let dir = g.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
            let workers = g.workers.unwrap_or_else(rayon::current_num_threads);
            let rows = sweep::run_sweep(&cfg, &axes, &dir, workers)?;
            println!("{} runs -> {}", rows.len(), dir.join("sweep.csv").display());
        }
        Command::Metrology { omega } => {
            let csv = g.out.as_ref().map(|d| d.join("gyroscopes.csv"));
            if let Some(d) = &g.out {
                std::fs::create_dir_all(d).map_err(|source| CliError::Io { context: format!("creating {}", d.display()), source })?;
            }
            print!("{}", metrology_cmd::run(g.config.as_deref(), csv.as_deref(), omega)?);
        }
        Command::Analyze { snapshots, radius, bins, momenta, no_lobes } => {
            let mut analysis =
                if g.config.is_some() || g.preset.is_some() { load_config(g)?.analysis } else { Default::default() };
            if radius.is_some() {
                analysis.radius = radius;
            }
            if let Some(b) = bins {
                analysis.bins = b;
            }
            if !momenta.is_empty() {
                analysis.momenta = momenta;
            }
            if no_lobes {
                analysis.lobes = false;
            }
            print!("{}", analyze::run(&snapshots, &analysis)?);
        }
        Command::Presets { name: None } => {
            for name in presets::PRESET_NAMES {
                println!("{name:<26} {}", presets::describe(name).unwrap_or_default());
            }
        }
        Command::Presets { name: Some(name) } => {
            let cfg = presets::preset(&name).ok_or(ConfigError::UnknownPreset(name))?;
            print!("{}", cfg.to_toml_string());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
