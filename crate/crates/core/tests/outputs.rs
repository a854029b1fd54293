use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ptp_sim::config::{ScenarioConfig, SweepConfig};
use ptp_sim::runner::{run_single, run_sweep, write_report};
use ptp_sim::stats::SUMMARY_HEADER;

fn small(name: &str) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::fig3(name).at_load(60.0, 20.0).unwrap();
    cfg.slaves = 3;
    cfg.duration_s = 3.0;
    cfg
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn summary_recomputes_from_vector_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_single(&small("vec"), 9, "vec_seed9").unwrap();
    write_report(&report, dir.path()).unwrap();

    let vector = fs::read_to_string(dir.path().join("vector_vec_seed9.csv")).unwrap();
    let mut lines = vector.lines();
    assert_eq!(lines.next(), Some("time_ps,slave,error_ps"));
    let abs_ns: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse::<i64>().unwrap().unsigned_abs() as f64 / 1e3)
        .collect();
    let mean = abs_ns.iter().sum::<f64>() / abs_ns.len() as f64;
    let max = abs_ns.iter().cloned().fold(0.0, f64::max);

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let mut rows = summary.lines();
    assert_eq!(rows.next(), Some(SUMMARY_HEADER));
    let cols: Vec<&str> = rows.next().unwrap().split(',').collect();
    assert_eq!(&cols[..7], ["vec", "9", "60", "20", "fifo", "none", "3"]);
    assert!((cols[7].parse::<f64>().unwrap() - mean).abs() < 1e-3);
    assert!((cols[10].parse::<f64>().unwrap() - max).abs() < 1e-3);
    assert_eq!(cols[11].parse::<usize>().unwrap(), abs_ns.len());

    let pdf = fs::read_to_string(dir.path().join("pdf_vec_seed9.csv")).unwrap();
    let mut pdf_lines = pdf.lines();
    assert_eq!(pdf_lines.next(), Some("bin_center_ns,probability"));
    let total: f64 = pdf_lines.map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn true_time_column_is_optional() {
    let mut cfg = small("tt");
    cfg.stats.true_time_columns = true;
    let report = run_single(&cfg, 1, "tt").unwrap();
    assert!(report.vector_csv().starts_with("time_ps,slave,error_ps,true_error_ps\n"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let r = run_single(&small("rep"), 77, "rep_seed77").unwrap();
        write_report(&r, dir).unwrap();
    }
    assert_eq!(dir_contents(a.path()), dir_contents(b.path()));
}

#[test]
fn sweep_output_ignores_job_count() {
    let mut cfg = small("sw");
    cfg.duration_s = 2.0;
    cfg.sweep = SweepConfig {
        up_mbps: vec![0.0, 70.0],
        down_mbps: vec![30.0],
        repetitions: 3,
        base_seed: 5,
        ..Default::default()
    };
    let serial = tempfile::tempdir().unwrap();
    let parallel = tempfile::tempdir().unwrap();
    let s1 = run_sweep(&cfg, serial.path(), 1).unwrap();
    let s4 = run_sweep(&cfg, parallel.path(), 4).unwrap();
    assert_eq!(s1.completed, 6);
    assert_eq!(s1, s4);
    let files = dir_contents(serial.path());
    assert_eq!(files.len(), 1 + 2 * 6);
    assert_eq!(files, dir_contents(parallel.path()));
    let summary = String::from_utf8(files["summary.csv"].clone()).unwrap();
    assert_eq!(summary.lines().count(), 7);

    // A second sweep into the same directory rewrites rather than appends.
    run_sweep(&cfg, serial.path(), 2).unwrap();
    assert_eq!(files, dir_contents(serial.path()));
}

#[test]
fn grid_sweep_row_count() {
    let mut cfg = small("grid");
    cfg.duration_s = 2.0;
    cfg.slaves = 1;
    cfg.sweep = SweepConfig {
        up_mbps: vec![0.0, 30.0, 60.0],
        down_mbps: vec![0.0, 30.0],
        repetitions: 2,
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&cfg, dir.path(), 0).unwrap();
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 3 * 2 * 2);
}
