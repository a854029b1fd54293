//! A static path asymmetry halves straight into the offset estimate, and
//! the `delay_asymmetry` setting cancels it.

use ptp_sim::config::{PerDirection, ScenarioConfig};
use ptp_sim::runner::execute;

fn main() {
    let mut cfg = ScenarioConfig {
        topology: "pair".into(),
        duration_s: 10.0,
        ..Default::default()
    };
    cfg.clocks.master.drift.max_ppm = 0.0;
    cfg.clocks.slave.drift.max_ppm = 0.0;

    for (ms, sm) in [(100.0, 60.0), (60.0, 100.0), (250.0, 50.0)] {
        cfg.link.prop_us = PerDirection { ms, sm };
        for a in [0.0, (ms - sm) / 2.0] {
            cfg.ptp.delay_asymmetry_us = a;
            let out = execute(&cfg, 1, "pair").expect("run");
            let last = out.result.stats.steady_samples().last().expect("sample");
            println!(
                "d_ms={ms:>5} us d_sm={sm:>5} us  A={a:>6} us  ->  error {:>10.3} us",
                last.error_ps as f64 / 1e6
            );
        }
    }
}
