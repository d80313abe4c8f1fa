//! `mirrorlight` command-line runner.
//!
//! Exit status: 0 on success, 1 for configuration or usage errors, 2 for
//! failures while running (infeasible geometry, unwritable output).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mirrorlight::experiment::{run_experiment, ExperimentKind};
use mirrorlight::scenario::{load_config, ScenarioConfig};
use mirrorlight::Error;

#[derive(Debug, Parser)]
#[command(
    name = "mirrorlight",
    version,
    about = "Mirror-assisted visible-light coverage experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Potential line-of-sight blockage map for each panel size.
    BlockageMap(Common),
    /// Peak error of the patch approximation over mirror sweeps.
    RelativeError(Common),
    /// Shadowing probability over paraboloid sweeps.
    ShadowingSweep(Common),
    /// Line-of-sight and mirror irradiance of the configured mirror.
    IrradianceField(Common),
    /// SNR distributions for the compared mirrors.
    SnrCdf(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (`key = value`) or a previous run's manifest.json.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Random stream seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Receiver cells per side.
    #[arg(long)]
    grid: Option<usize>,
    /// Mirror samples per surface axis, or `auto`.
    #[arg(long)]
    mesh: Option<String>,
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::BlockageMap(c) => (ExperimentKind::BlockageMap, c),
            Command::RelativeError(c) => (ExperimentKind::RelativeErrorSweep, c),
            Command::ShadowingSweep(c) => (ExperimentKind::ShadowingSweep, c),
            Command::IrradianceField(c) => (ExperimentKind::IrradianceField, c),
            Command::SnrCdf(c) => (ExperimentKind::SnrCdf, c),
        }
    }
}

fn resolve(common: &Common) -> Result<ScenarioConfig, Error> {
    let base = match &common.config {
        Some(path) => load_config(path)?,
        None => ScenarioConfig::default(),
    };
    let mut pairs = base.to_pairs();
    let mut set = |key: &str, value: String| {
        if let Some(slot) = pairs.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        }
    };
    if let Some(seed) = common.seed {
        set("seed", seed.to_string());
    }
    if let Some(grid) = common.grid {
        set("grid.n", grid.to_string());
    }
    if let Some(mesh) = &common.mesh {
        set("mesh.resolution", mesh.clone());
    }
    ScenarioConfig::from_pairs(pairs)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (kind, common) = cli.command.split();
    let config = match resolve(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_config() || matches!(e, Error::Io { .. } | Error::Manifest(_)) {
                1
            } else {
                2
            });
        }
    };
    match run_experiment(&config, kind, &common.out) {
        Ok(report) => {
            println!("{}", report.data.display());
            println!("{}", report.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}
