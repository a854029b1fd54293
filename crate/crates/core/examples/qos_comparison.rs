//! FIFO against strict-priority router queues under 90 Mbps of upstream
//! background load.

use ptp_sim::config::{QueueModeConfig, ScenarioConfig};
use ptp_sim::runner::execute;

fn main() {
    let seeds = 5;
    for (up, down) in [(90.0, 0.0), (50.0, 50.0), (0.0, 90.0)] {
        for mode in [QueueModeConfig::Fifo, QueueModeConfig::Priority] {
            let mut cfg = ScenarioConfig::fig3("qos").at_load(up, down).expect("load");
            cfg.queue.mode = mode;
            let mean: f64 = (1..=seeds)
                .map(|s| execute(&cfg, s, "q").expect("run").report.summary.mean_ns)
                .sum::<f64>()
                / seeds as f64;
            println!("up={up:>4} down={down:>4} {mode:?}: mean |error| {:>8.2} us", mean / 1e3);
        }
    }
}
