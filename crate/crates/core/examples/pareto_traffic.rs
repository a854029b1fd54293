//! Pareto interarrivals: empirical quantiles against the closed form, and
//! the offered load a flow actually produces.

use ptp_sim::net::NodeId;
use ptp_sim::rng::RngStream;
use ptp_sim::traffic::{pareto_sample, PacketSize, ParetoSpec, TrafficFlow};

fn main() {
    let spec = ParetoSpec::new(1.5, 1.0).expect("spec");
    let mut rng = RngStream::derive(42, "pareto-demo");
    let n = 1_000_000;
    let mut xs: Vec<f64> = (0..n)
        .map(|_| pareto_sample(&spec, rng.unit_open_closed()).expect("u"))
        .collect();
    xs.sort_by(f64::total_cmp);
    println!("min sample {:.6} (scale 1.0)", xs[0]);
    for p in [0.5, 0.9, 0.99] {
        let emp = xs[(p * n as f64) as usize];
        println!("p={p:<4} empirical {emp:>8.4}  exact {:>8.4}", spec.quantile(p));
    }

    let flow = TrafficFlow::new("demo", NodeId(0), NodeId(1), PacketSize::Fixed(1000), 50e6, 1.5)
        .expect("flow");
    let mut rng = RngStream::derive(7, "traffic:demo");
    let (mut t, mut bits) = (0.0, 0.0);
    while t < 600.0 {
        let p = flow.next_packet(&mut rng).expect("enabled");
        t += p.delta.as_secs_f64();
        bits += p.size_bytes as f64 * 8.0;
    }
    println!("target 50 Mbps, offered over {t:.0} s: {:.2} Mbps", bits / t / 1e6);
}
