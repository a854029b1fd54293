//! Ten slaves on an idle network: exact with ideal clocks, a few
//! microseconds with ±25 ppm oscillators.

use ptp_sim::config::ScenarioConfig;
use ptp_sim::runner::execute;

fn main() {
    let mut ideal = ScenarioConfig::fig3("ideal");
    for c in [&mut ideal.clocks.master, &mut ideal.clocks.slave, &mut ideal.clocks.router] {
        c.drift.max_ppm = 0.0;
    }
    let out = execute(&ideal, 1, "ideal").expect("run");
    let worst = out
        .result
        .stats
        .steady_samples()
        .map(|s| s.error_ps.abs())
        .max()
        .unwrap_or(0);
    println!("ideal clocks: worst |error| after first exchange = {worst} ps");

    let drifting = ScenarioConfig::fig3("drifting");
    for seed in 1..=5 {
        let s = execute(&drifting, seed, "d").expect("run").report.summary;
        println!(
            "±25 ppm seed {seed}: mean {:>8.1} ns  max {:>8.1} ns  ({} samples)",
            s.mean_ns, s.max_ns, s.samples
        );
    }
}
