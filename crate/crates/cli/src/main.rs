use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pcattack::harness::{
    emit_cdf, emit_csv, run_experiment, write_csv, ConfigFile, ExperimentSpec, Scale, Scenario, Unit,
};

#[derive(Parser)]
#[command(name = "pcattack", version, about = "Pilot-contamination attack experiments for massive MIMO downlinks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment scenario and write its result table as CSV.
    Run {
        /// Scenario id (see `list-scenarios`); may instead come from `--config`.
        scenario: Option<String>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Print the scenario catalog.
    ListScenarios,
    /// Check a configuration file and print the experiment it describes.
    ValidateConfig {
        /// Path to the TOML configuration.
        #[arg(long, short)]
        config: PathBuf,
        /// Scenario overriding the file's `scenario` entry.
        scenario: Option<String>,
    },
}

#[derive(Args)]
struct RunOpts {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long, value_enum)]
    scale: Option<ScaleArg>,
    #[arg(long, value_enum)]
    unit: Option<UnitArg>,
    /// CSV destination; stdout when omitted. CDF curves go next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with experiment settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Se,
    Mbps,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Paper => Scale::Paper,
        }
    }
}

impl From<UnitArg> for Unit {
    fn from(u: UnitArg) -> Self {
        match u {
            UnitArg::Se => Unit::Se,
            UnitArg::Mbps => Unit::Mbps,
        }
    }
}

fn parse_scenario(id: Option<&str>) -> Result<Option<Scenario>> {
    id.map(|s| s.parse::<Scenario>().map_err(anyhow::Error::from)).transpose()
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p).with_context(|| format!("reading config {}", p.display())),
        None => Ok(ConfigFile::default()),
    }
}

fn build_spec(scenario: Option<&str>, opts: &RunOpts) -> Result<ExperimentSpec> {
    let mut file = load_config(opts.config.as_deref())?;
    // flags override the file before defaults are resolved, so that
    // `--scale` also picks the matching default realization count
    if let Some(v) = opts.seed {
        file.seed = Some(v);
    }
    if let Some(v) = opts.realizations {
        file.realizations = Some(v);
    }
    if let Some(v) = opts.scale {
        file.scale = Some(v.into());
    }
    if let Some(v) = opts.unit {
        file.unit = Some(v.into());
    }
    if let Some(v) = &opts.out {
        file.out = Some(v.clone());
    }
    let spec = file.to_spec(parse_scenario(scenario)?)?;
    spec.validate()?;
    Ok(spec)
}

fn cdf_path(out: &Path, scheme: &str, sweep: f64) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    out.with_file_name(format!("{stem}_cdf_{scheme}_{sweep}.csv"))
}

fn run(scenario: Option<&str>, opts: &RunOpts) -> Result<()> {
    let spec = build_spec(scenario, opts)?;
    let output = run_experiment(&spec).with_context(|| format!("running {}", spec.scenario))?;
    match &spec.out {
        Some(path) => {
            emit_csv(&output.rows, path).with_context(|| format!("writing {}", path.display()))?;
            for c in &output.cdfs {
                let p = cdf_path(path, &c.scheme, c.sweep);
                emit_cdf(&c.samples, &p).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&output.rows, stdout.lock())?;
        }
    }
    Ok(())
}

fn list_scenarios() -> Result<()> {
    let mut out = std::io::stdout().lock();
    for s in Scenario::ALL {
        let sweep: Vec<String> = s.default_sweep().iter().map(|v| v.to_string()).collect();
        writeln!(out, "{:<6} {:<8} [{}]  {}", s.id(), s.sweep_var().name(), sweep.join(", "), s.description())?;
    }
    Ok(())
}

fn validate_config(path: &Path, scenario: Option<&str>) -> Result<()> {
    let spec = load_config(Some(path))?.to_spec(parse_scenario(scenario)?)?;
    spec.validate()?;
    println!(
        "ok: {} seed={} realizations={} scale={:?} unit={:?} sweep={:?}",
        spec.scenario,
        spec.seed,
        spec.realizations,
        spec.scale,
        spec.unit,
        spec.sweep_values()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { scenario, opts } => run(scenario.as_deref(), opts),
        Command::ListScenarios => list_scenarios(),
        Command::ValidateConfig { config, scenario } => validate_config(config, scenario.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
