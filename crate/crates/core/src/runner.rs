//! Single runs, seeded load sweeps and their output files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::{error, info};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::rng::hash_seed;
use crate::scenario::{self, algo_label, qos_label};
use crate::sim::{RunResult, SimError};
use crate::stats::{RunMeta, RunReport, SUMMARY_FILE};
use crate::time::PS_PER_NS;

/// Environment variable that overrides any `--out` directory.
pub const OUT_DIR_ENV: &str = "PTPSIM_OUT_DIR";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("cannot write outputs to {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// One planned run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub run_id: String,
    pub seed: u64,
    pub config: ScenarioConfig,
}

pub struct RunOutput {
    pub report: RunReport,
    pub result: RunResult,
}

pub fn single_run_id(name: &str, seed: u64) -> String {
    format!("{name}_seed{seed}")
}

pub fn sweep_run_id(name: &str, up: f64, down: f64, rep: u32) -> String {
    format!("{name}_u{up}_d{down}_r{rep:02}")
}

/// Root seed of one sweep repetition. Depends on the load values rather than
/// the point's position, so two sweeps that differ only in queue mode or
/// algorithm see the same traffic and clocks at every shared point.
pub fn sweep_seed(base_seed: u64, up: f64, down: f64, rep: u32) -> u64 {
    hash_seed(&[base_seed, up.to_bits(), down.to_bits(), rep as u64])
}

/// Runs `cfg` once with `seed` and keeps the raw result alongside the report.
pub fn execute(cfg: &ScenarioConfig, seed: u64, run_id: &str) -> Result<RunOutput, RunError> {
    let scn = scenario::build(cfg)?;
    let result = scn.simulation(seed)?.run()?;
    let report = report_for(cfg, seed, run_id, &result);
    Ok(RunOutput { report, result })
}

pub fn run_single(cfg: &ScenarioConfig, seed: u64, run_id: &str) -> Result<RunReport, RunError> {
    execute(cfg, seed, run_id).map(|o| o.report)
}

fn report_for(cfg: &ScenarioConfig, seed: u64, run_id: &str, result: &RunResult) -> RunReport {
    let meta = RunMeta {
        scenario: cfg.name.clone(),
        seed,
        up_mbps: cfg.up_mbps(),
        down_mbps: cfg.down_mbps(),
        qos: qos_label(cfg).into(),
        algo: algo_label(cfg).into(),
        slaves: result.slaves.len(),
    };
    let bin_ps = ((cfg.stats.bin_width_ns * PS_PER_NS as f64).round() as u64).max(1);
    let vector = result
        .stats
        .steady_samples()
        .map(|s| {
            (
                s.t.as_ps(),
                result.topology.name(s.slave).to_owned(),
                s.error_ps,
                s.true_error_ps,
            )
        })
        .collect();
    RunReport {
        run_id: run_id.to_owned(),
        summary: result.stats.summarize(meta),
        pdf: result.stats.histogram(bin_ps),
        vector,
        true_time_columns: cfg.stats.true_time_columns,
    }
}

/// Every `(load point, repetition)` of the sweep, in output order.
pub fn sweep_plan(cfg: &ScenarioConfig) -> Result<Vec<RunSpec>, ConfigError> {
    cfg.validate_sweep()?;
    let mut plan = Vec::new();
    for (up, down) in cfg.sweep.load_points() {
        let point = cfg.at_load(up, down)?;
        for rep in 0..cfg.sweep.repetitions {
            plan.push(RunSpec {
                run_id: sweep_run_id(&cfg.name, up, down, rep),
                seed: sweep_seed(cfg.sweep.base_seed, up, down, rep),
                config: point.clone(),
            });
        }
    }
    Ok(plan)
}

/// Executes `plan` on `jobs` worker threads (0 picks the core count).
/// Results come back in plan order whatever the concurrency.
pub fn run_plan(plan: &[RunSpec], jobs: usize) -> Vec<Result<RunReport, RunError>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        plan.par_iter()
            .map(|spec| {
                let r = run_single(&spec.config, spec.seed, &spec.run_id);
                match &r {
                    Ok(rep) => info!("{} done: mean {:.3} ns", spec.run_id, rep.summary.mean_ns),
                    Err(e) => error!("{} failed: {e}", spec.run_id),
                }
                r
            })
            .collect()
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepSummary {
    pub completed: usize,
    pub failed: Vec<String>,
}

/// Creates `dir` and checks that it accepts files.
pub fn prepare_out_dir(dir: &Path) -> Result<(), RunError> {
    let io_err = |source| RunError::Io {
        path: dir.to_owned(),
        source,
    };
    fs::create_dir_all(dir).map_err(io_err)?;
    let probe = dir.join(".ptpsim-write-check");
    fs::write(&probe, b"").map_err(io_err)?;
    fs::remove_file(&probe).map_err(io_err)
}

pub fn write_report(report: &RunReport, out_dir: &Path) -> Result<(), RunError> {
    report.write_outputs(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_owned(),
        source,
    })
}

/// Runs the whole sweep and writes a fresh `summary.csv` plus per-run files.
/// A failing run is logged and skipped; the others still complete.
pub fn run_sweep(cfg: &ScenarioConfig, out_dir: &Path, jobs: usize) -> Result<SweepSummary, RunError> {
    let plan = sweep_plan(cfg)?;
    prepare_out_dir(out_dir)?;
    let summary_path = out_dir.join(SUMMARY_FILE);
    if summary_path.exists() {
        fs::remove_file(&summary_path).map_err(|source| RunError::Io {
            path: summary_path.clone(),
            source,
        })?;
    }
    info!("sweep `{}`: {} runs", cfg.name, plan.len());
    let mut out = SweepSummary::default();
    for (spec, result) in plan.iter().zip(run_plan(&plan, jobs)) {
        match result.and_then(|r| write_report(&r, out_dir)) {
            Ok(()) => out.completed += 1,
            Err(e) => {
                error!("{}: {e}", spec.run_id);
                out.failed.push(spec.run_id.clone());
            }
        }
    }
    Ok(out)
}
