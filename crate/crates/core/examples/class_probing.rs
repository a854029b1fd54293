//! Class probing: a low-priority frame goes out right before every Sync
//! and Delay_Req. Prints the error with and without probes, and how it
//! moves with the probe size.

use ptp_sim::config::{AsymmAlgoConfig, QueueModeConfig, ScenarioConfig};
use ptp_sim::runner::execute;

fn mean_error_us(cfg: &ScenarioConfig, seeds: u64) -> f64 {
    (1..=seeds)
        .map(|s| execute(cfg, s, "p").expect("run").report.summary.mean_ns)
        .sum::<f64>()
        / seeds as f64
        / 1e3
}

fn main() {
    let seeds = 3;
    for (up, down) in [(50.0, 50.0), (90.0, 0.0)] {
        let mut cfg = ScenarioConfig::fig3("probe").at_load(up, down).expect("load");
        cfg.queue.mode = QueueModeConfig::Priority;
        println!("up={up} down={down}: no probe {:.2} us", mean_error_us(&cfg, seeds));
        cfg.ptp.asymm_algo = AsymmAlgoConfig::ClassProbe;
        for size in [64, 300, 1000, 1500] {
            cfg.ptp.probe_size_bytes = size;
            println!("  probe {size:>4} B: {:.2} us", mean_error_us(&cfg, seeds));
        }
    }

    let mut cfg = ScenarioConfig::fig3("count");
    cfg.slaves = 1;
    cfg.duration_s = 10.0;
    cfg.ptp.asymm_algo = AsymmAlgoConfig::ClassProbe;
    let out = execute(&cfg, 1, "count").expect("run");
    println!(
        "one slave, 10 s idle: {} probes, one ahead of each Sync and each Delay_Req",
        out.result.counters.probes
    );
}
