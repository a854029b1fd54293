//! A small seeded sweep written to disk. Set PTPSIM_OUT_DIR to choose the
//! directory.

use std::path::PathBuf;

use ptp_sim::config::{ScenarioConfig, SweepConfig};
use ptp_sim::runner::{run_sweep, OUT_DIR_ENV};

fn main() {
    let out = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("ptpsim-load-sweep"));
    let mut cfg = ScenarioConfig::fig3("sweep");
    cfg.duration_s = 20.0;
    cfg.sweep = SweepConfig {
        up_mbps: vec![0.0, 90.0],
        down_mbps: vec![0.0, 90.0],
        repetitions: 2,
        ..Default::default()
    };
    let summary = run_sweep(&cfg, &out, 0).expect("sweep");
    println!("{} runs, {} failed, output in {}", summary.completed, summary.failed.len(), out.display());
    print!("{}", std::fs::read_to_string(out.join("summary.csv")).expect("summary"));
}
