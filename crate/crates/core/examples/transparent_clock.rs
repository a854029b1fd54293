//! A router that holds Sync frames for a fixed 30 us. Without residence
//! stamping the slave is off by half of it; a transparent clock removes
//! the error, up to the drift of its own oscillator.

use ptp_sim::config::{PerDirection, ScenarioConfig};
use ptp_sim::runner::execute;

fn main() {
    let mut cfg = ScenarioConfig {
        topology: "chain".into(),
        duration_s: 10.0,
        ..Default::default()
    };
    cfg.clocks.master.drift.max_ppm = 0.0;
    cfg.clocks.slave.drift.max_ppm = 0.0;
    cfg.router.injected_residence_us = PerDirection { ms: 30.0, sm: 0.0 };

    for (tc, perfect) in [(false, true), (true, true), (true, false)] {
        cfg.router.transparent_clock = tc;
        cfg.router.perfect_clock = perfect;
        cfg.clocks.router.drift.max_ppm = 100.0;
        let out = execute(&cfg, 3, "chain").expect("run");
        let last = out.result.stats.steady_samples().last().expect("sample");
        println!(
            "transparent={tc:<5} perfect router clock={perfect:<5} -> error {:>9.3} ns",
            last.error_ps as f64 / 1e3
        );
    }
}
