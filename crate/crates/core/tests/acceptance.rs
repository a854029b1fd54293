//! Acceptance report. Prints one PASS/FAIL line per criterion and exits
//! nonzero on failure only when `ACCEPTANCE_STRICT=1`.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use ptp_sim::config::{AsymmAlgoConfig, PerDirection, QueueModeConfig, ScenarioConfig, SweepConfig};
use ptp_sim::rng::RngStream;
use ptp_sim::runner::{execute, run_sweep, sweep_seed};
use ptp_sim::stats::SummaryRecord;
use ptp_sim::traffic::{pareto_sample, ParetoSpec};

const SEEDS: u32 = 15;
const BASE_SEED: u64 = 1;
const ONE_PS: i64 = 1;

struct Report {
    failures: Vec<u32>,
    warnings: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, ok: bool, soft: bool, text: String) {
        let tag = match (ok, soft) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "WARN",
        };
        println!("[{tag}] criterion {id:>2}: {text}");
        if !ok {
            if soft {
                self.warnings.push(id);
            } else {
                self.failures.push(id);
            }
        }
    }
}

fn still(mut cfg: ScenarioConfig) -> ScenarioConfig {
    for c in [&mut cfg.clocks.master, &mut cfg.clocks.slave, &mut cfg.clocks.router] {
        c.drift.max_ppm = 0.0;
    }
    cfg
}

fn steady(cfg: &ScenarioConfig, seed: u64) -> Vec<i64> {
    execute(cfg, seed, "acc").unwrap().result.stats.steady_samples().map(|s| s.error_ps).collect()
}

fn max_dev(e: &[i64], target: i64) -> i64 {
    e.iter().map(|x| (x - target).abs()).max().unwrap_or(i64::MAX)
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn exact_baseline(rep: &mut Report) {
    let t = Instant::now();
    let e = steady(&still(ScenarioConfig::fig3("c1")), BASE_SEED);
    let dev = max_dev(&e, 0);
    let took = secs(t);
    rep.line(
        1,
        !e.is_empty() && dev <= ONE_PS && took < 1.0,
        false,
        format!("fig3 idle, no drift: max |error| {dev} ps over {} samples (<= 1 ps), {took:.2} s (< 1 s)", e.len()),
    );
}

fn asymmetry_law(rep: &mut Report) {
    let t = Instant::now();
    let mut cfg = still(ScenarioConfig {
        name: "c2".into(),
        topology: "pair".into(),
        ..Default::default()
    });
    cfg.link.prop_us = PerDirection { ms: 100.0, sm: 60.0 };
    let e = steady(&cfg, BASE_SEED);
    // Slave-minus-master error is negative: the slave sets its clock late.
    let off = max_dev(&e, -20_000_000);
    cfg.ptp.delay_asymmetry_us = 20.0;
    let fixed = max_dev(&steady(&cfg, BASE_SEED), 0);
    let took = secs(t);
    rep.line(
        2,
        off <= ONE_PS && fixed <= ONE_PS && took < 1.0,
        false,
        format!(
            "100/60 us link: |error| = 20 us +- {off} ps; with delayAsymmetry 20 us max {fixed} ps; {took:.2} s (< 1 s)"
        ),
    );
}

fn transparent_clock_law(rep: &mut Report) {
    let mut cfg = still(ScenarioConfig {
        name: "c3".into(),
        topology: "chain".into(),
        duration_s: 10.0,
        ..Default::default()
    });
    cfg.router.perfect_clock = true;
    cfg.router.injected_residence_us = PerDirection { ms: 30.0, sm: 0.0 };
    let off = max_dev(&steady(&cfg, BASE_SEED), -15_000_000);
    cfg.router.transparent_clock = true;
    let fixed = max_dev(&steady(&cfg, BASE_SEED), 0);
    rep.line(
        3,
        off <= ONE_PS && fixed <= ONE_PS,
        false,
        format!("30 us Sync residence: |error| = 15 us +- {off} ps uncorrected; {fixed} ps with residence correction"),
    );
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Setup {
    Fifo,
    Prio,
    PrioProbe,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Point {
    setup: Setup,
    up: u32,
    down: u32,
}

fn point_config(p: Point, probe_bytes: u32) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::fig3("acc").at_load(p.up as f64, p.down as f64).unwrap();
    if p.setup != Setup::Fifo {
        cfg.queue.mode = QueueModeConfig::Priority;
    }
    if p.setup == Setup::PrioProbe {
        cfg.ptp.asymm_algo = AsymmAlgoConfig::ClassProbe;
        cfg.ptp.probe_size_bytes = probe_bytes;
    }
    cfg
}

/// Per-seed summaries for every point, computed once on all cores.
fn load_runs(points: &[Point], probe_bytes: u32) -> HashMap<Point, Vec<SummaryRecord>> {
    let jobs: Vec<(Point, u32)> = points.iter().flat_map(|&p| (0..SEEDS).map(move |r| (p, r))).collect();
    let done: Vec<(Point, u32, SummaryRecord)> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let seed = sweep_seed(BASE_SEED, p.up as f64, p.down as f64, r);
            let out = execute(&point_config(p, probe_bytes), seed, "acc").unwrap();
            (p, r, out.report.summary)
        })
        .collect();
    let mut map: HashMap<Point, Vec<SummaryRecord>> = HashMap::new();
    for (p, _, s) in done {
        map.entry(p).or_default().push(s);
    }
    map
}

/// Mean |error| over every steady sample of every seed, in microseconds.
fn aggregate_us(runs: &[SummaryRecord]) -> f64 {
    let n: usize = runs.iter().map(|r| r.samples).sum();
    runs.iter().map(|r| r.mean_ns * r.samples as f64).sum::<f64>() / n as f64 / 1e3
}

/// Exact two-sided sign test p-value for `wins` out of `n` non-tied pairs.
fn sign_test_p(wins: u32, n: u32) -> f64 {
    let choose = |k: u32| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    let tail = wins.min(n - wins);
    let p: f64 = (0..=tail).map(choose).sum::<f64>() / 2f64.powi(n as i32);
    (2.0 * p).min(1.0)
}

fn paired_wins(with: &[SummaryRecord], without: &[SummaryRecord]) -> (u32, u32) {
    let mut wins = 0;
    let mut ties = 0;
    for (a, b) in with.iter().zip(without) {
        assert_eq!(a.meta.seed, b.meta.seed);
        if a.mean_ns < b.mean_ns {
            wins += 1;
        } else if a.mean_ns == b.mean_ns {
            ties += 1;
        }
    }
    (wins, with.len() as u32 - ties)
}

fn pareto_oracle(rep: &mut Report) {
    let spec = ParetoSpec::new(1.5, 1.0).unwrap();
    let mut rng = RngStream::derive(BASE_SEED, "acceptance/pareto");
    let mut xs: Vec<f64> = (0..1_000_000)
        .map(|_| pareto_sample(&spec, rng.unit_open_closed()).unwrap())
        .collect();
    xs.sort_by(f64::total_cmp);
    let below = xs.iter().filter(|&&x| x < 1.0).count();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for p in [0.5f64, 0.9, 0.99] {
        let want = (1.0 - p).powf(-1.0 / 1.5);
        let got = xs[(p * xs.len() as f64) as usize];
        let rel = (got - want).abs() / want;
        worst = worst.max(rel);
        parts.push(format!("q{p} {got:.4} vs {want:.4}"));
    }
    rep.line(
        9,
        worst <= 0.02 && below == 0,
        false,
        format!("Pareto(1.5, 1), 1e6 draws: {}; worst {:.2}% (<= 2%), {below} below b", parts.join(", "), worst * 100.0),
    );
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism(rep: &mut Report) {
    let mut cfg = ScenarioConfig::fig3("c10");
    cfg.duration_s = 10.0;
    cfg.queue.mode = QueueModeConfig::Priority;
    cfg.ptp.asymm_algo = AsymmAlgoConfig::ClassProbe;
    cfg.sweep = SweepConfig {
        points: vec![[0.0, 0.0], [90.0, 0.0], [50.0, 50.0]],
        repetitions: 2,
        base_seed: 42,
        ..Default::default()
    };
    let outs: Vec<_> = [1, 1, 4]
        .iter()
        .map(|&jobs| {
            let dir = tempfile::tempdir().unwrap();
            run_sweep(&cfg, dir.path(), jobs).unwrap();
            dir_bytes(dir.path())
        })
        .collect();
    let files = outs[0].len();
    rep.line(
        10,
        files == 13 && outs[0] == outs[1] && outs[0] == outs[2],
        false,
        format!("6-run sweep repeated serially and with 4 jobs: {files} files, byte-identical: {}", outs[0] == outs[1] && outs[0] == outs[2]),
    );
}

fn main() {
    let started = Instant::now();
    let mut rep = Report {
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    println!("acceptance: {SEEDS} seeds x 60 s per load point, base seed {BASE_SEED}");
    exact_baseline(&mut rep);
    asymmetry_law(&mut rep);
    transparent_clock_law(&mut rep);

    let p = |setup, up, down| Point { setup, up, down };
    let fifo_90_0 = p(Setup::Fifo, 90, 0);
    let fifo_50_50 = p(Setup::Fifo, 50, 50);
    let fifo_0_0 = p(Setup::Fifo, 0, 0);
    let prio_90_0 = p(Setup::Prio, 90, 0);
    let prio_50_50 = p(Setup::Prio, 50, 50);
    let probe_50_50 = p(Setup::PrioProbe, 50, 50);
    let prio_90_90 = p(Setup::Prio, 90, 90);
    let t = Instant::now();
    let runs = load_runs(
        &[fifo_90_0, fifo_50_50, fifo_0_0, prio_90_0, prio_50_50, probe_50_50, prio_90_90],
        1000,
    );
    println!("  ({} loaded runs in {:.1} s)", runs.values().map(Vec::len).sum::<usize>(), secs(t));
    let agg = |pt: Point| aggregate_us(&runs[&pt]);

    let idle = &runs[&fifo_0_0];
    let worst = idle.iter().map(|r| r.mean_ns / 1e3).fold(0.0, f64::max);
    rep.line(
        4,
        idle.iter().all(|r| r.samples > 0 && r.mean_ns < 10_000.0),
        false,
        format!("fig3 zero load, +-25 ppm: worst per-run mean |error| {worst:.2} us (< 10 us in all {SEEDS} runs)"),
    );

    let (fifo, prio) = (agg(fifo_90_0), agg(prio_90_0));
    rep.line(
        5,
        fifo > prio && (50.0..=600.0).contains(&fifo) && (2.0..=100.0).contains(&prio),
        false,
        format!(
            "(90,0): FIFO {fifo:.2} us > priority {prio:.2} us: {}; FIFO in [50, 600]: {}; priority in [2, 100]: {}",
            fifo > prio,
            (50.0..=600.0).contains(&fifo),
            (2.0..=100.0).contains(&prio)
        ),
    );

    let (a, b, c) = (agg(fifo_90_0), agg(fifo_50_50), agg(fifo_0_0));
    rep.line(
        6,
        a > b && b > c,
        false,
        format!("FIFO (90,0) {a:.2} us > (50,50) {b:.2} us > (0,0) {c:.2} us"),
    );

    let (with, without) = (agg(probe_50_50), agg(prio_50_50));
    let (wins, n) = paired_wins(&runs[&probe_50_50], &runs[&prio_50_50]);
    let pval = sign_test_p(wins, n);
    rep.line(
        7,
        with < without && wins * 2 > n && pval < 0.05,
        false,
        format!(
            "priority (50,50), {}-byte probes: {with:.2} us vs {without:.2} us without; probing lower in {wins}/{n} seeds, sign test p = {pval:.4} (needs a majority and p < 0.05)",
            1000
        ),
    );

    let (hi, mid) = (agg(prio_90_90), agg(prio_50_50));
    rep.line(
        8,
        hi <= mid,
        true,
        format!("priority (90,90) {hi:.2} us <= (50,50) {mid:.2} us (soft)"),
    );

    pareto_oracle(&mut rep);
    determinism(&mut rep);

    // Informational: the same sign test with a smaller probe frame.
    if std::env::var_os("ACCEPTANCE_SKIP_INFO").is_none() {
        let small = load_runs(&[probe_50_50], 300);
        let (wins, n) = paired_wins(&small[&probe_50_50], &runs[&prio_50_50]);
        println!(
            "[INFO] criterion  7 with 300-byte probes: {:.2} us vs {without:.2} us; wins {wins}/{n}, p = {:.4}",
            aggregate_us(&small[&probe_50_50]),
            sign_test_p(wins, n)
        );
    }

    println!(
        "acceptance: {} failed {:?}, {} soft warnings {:?}, {:.1} s",
        rep.failures.len(),
        rep.failures,
        rep.warnings.len(),
        rep.warnings,
        secs(started)
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && !rep.failures.is_empty() {
        std::process::exit(1);
    }
}

