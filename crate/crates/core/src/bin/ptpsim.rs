use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::warn;

use ptp_sim::config::ScenarioConfig;
use ptp_sim::runner::{self, OUT_DIR_ENV};
use ptp_sim::scenario::sweep_violations;

#[derive(Parser)]
#[command(name = "ptpsim", version, about = "Discrete-event IEEE 1588 PTP simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and append its line to summary.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Root seed; defaults to `seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (PTPSIM_OUT_DIR wins when set).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every load point and repetition of the config's sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Check a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn out_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(flag)
}

fn load(path: &Path) -> Result<ScenarioConfig, String> {
    ScenarioConfig::load(path).map_err(|e| e.to_string())
}

fn run(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), String> {
    let cfg = load(config)?;
    cfg.validate().map_err(|e| e.to_string())?;
    let out = out_dir(out).unwrap_or_else(|| PathBuf::from("out"));
    runner::prepare_out_dir(&out).map_err(|e| e.to_string())?;
    let seed = seed.unwrap_or(cfg.seed);
    let report = runner::run_single(&cfg, seed, &runner::single_run_id(&cfg.name, seed))
        .map_err(|e| e.to_string())?;
    runner::write_report(&report, &out).map_err(|e| e.to_string())?;
    println!("{}", report.summary.csv_line());
    if report.summary.is_empty() {
        warn!("no steady-state samples: no exchange completed");
    }
    Ok(())
}

fn sweep(config: &Path, out: Option<PathBuf>, jobs: usize) -> Result<(), String> {
    let cfg = load(config)?;
    let out = out_dir(out).ok_or_else(|| format!("sweep needs --out DIR or {OUT_DIR_ENV}"))?;
    let summary = runner::run_sweep(&cfg, &out, jobs).map_err(|e| e.to_string())?;
    println!(
        "{} runs written to {}, {} failed",
        summary.completed,
        out.display(),
        summary.failed.len()
    );
    if summary.failed.is_empty() {
        Ok(())
    } else {
        Err(format!("failed runs: {}", summary.failed.join(", ")))
    }
}

fn validate(config: &Path) -> Result<(), String> {
    let cfg = load(config)?;
    cfg.validate().map_err(|e| e.to_string())?;
    for v in sweep_violations(&cfg) {
        println!("note: `sweep` would reject this config: {v}");
    }
    println!("{}: ok", config.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { config, seed, out } => run(&config, seed, out),
        Cmd::Sweep { config, out, jobs } => sweep(&config, out, jobs),
        Cmd::Validate { config } => validate(&config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
