//! Building a network by hand with the lower-level API and tracing the
//! frames of one exchange.

use ptp_sim::net::Link;
use ptp_sim::sim::{ClockSpec, NodeKind, SimParams, Simulation, Topology, TracePoint};
use ptp_sim::SimTime;

fn main() {
    let mut topo = Topology::default();
    let master = topo.add_node("gm", NodeKind::Master);
    let sw = topo.add_node("edge", NodeKind::Router);
    let slave = topo.add_node("plc", NodeKind::Slave);
    topo.connect(master, sw, Link::symmetric(1_000_000_000, SimTime::from_ns(500)));
    topo.connect(sw, slave, Link::symmetric(100_000_000, SimTime::from_us(2)));

    let params = SimParams {
        duration: SimTime::from_ms(450),
        master_clock: ClockSpec::perfect(),
        slave_clock: ClockSpec::constant_ppm(10.0),
        router_clock: ClockSpec::perfect(),
        ..Default::default()
    };
    let mut sim = Simulation::new(topo, params, Vec::new(), 9).expect("build");
    sim.enable_trace();
    let res = sim.run().expect("run");
    for e in res.trace.iter().filter(|e| e.point == TracePoint::Arrive).take(8) {
        println!(
            "{:>12.3} us  {:?} arrives at {}",
            e.t.as_us_f64(),
            e.tag,
            res.topology.name(e.node)
        );
    }
    let last = res.stats.steady_samples().last().expect("sample");
    println!("error after the first exchanges: {} ps", last.error_ps);
}
