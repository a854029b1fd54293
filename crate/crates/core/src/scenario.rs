//! Turns a [`ScenarioConfig`] into a ready-to-run [`Simulation`].
//!
//! Three topologies are available:
//!
//! * `fig3`: `master - routerA - routerB - {s1..sN}` with `trafGen1` on
//!   routerA and `trafGen2` on routerB. Flow `trafGen1 -> trafGen2` shares
//!   the routerA→routerB hop with Sync; the reverse flow shares
//!   routerB→routerA with Delay_Req.
//! * `pair`: master and `s1` on a single link.
//! * `chain`: `master - router - s1`.

use crate::clock::DriftKind;
use crate::config::{
    AsymmAlgoConfig, ClockClassConfig, ConfigError, DriftKindConfig, QueueModeConfig,
    ScenarioConfig,
};
use crate::net::{Link, QueueMode, MAX_FRAME_BYTES, MIN_FRAME_BYTES};
use crate::ptp::{AsymmAlgoKind, SlaveConfig};
use crate::sim::{ClockSpec, NodeKind, SimError, SimParams, Simulation, Topology};
use crate::time::SimTime;
use crate::traffic::{PacketSize, TrafficFlow};

pub const TOPOLOGIES: [&str; 3] = ["fig3", "pair", "chain"];

/// Everything needed to start a run except the seed.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub topology: Topology,
    pub params: SimParams,
    pub flows: Vec<TrafficFlow>,
}

impl Scenario {
    pub fn simulation(&self, seed: u64) -> Result<Simulation, SimError> {
        Simulation::new(self.topology.clone(), self.params.clone(), self.flows.clone(), seed)
    }
}

fn mbps_to_bps(mbps: f64) -> u64 {
    (mbps * 1e6).round() as u64
}

fn queue_mode(m: QueueModeConfig) -> QueueMode {
    match m {
        QueueModeConfig::Fifo => QueueMode::Fifo,
        QueueModeConfig::Priority => QueueMode::Priority,
    }
}

fn algo_kind(a: AsymmAlgoConfig) -> AsymmAlgoKind {
    match a {
        AsymmAlgoConfig::None => AsymmAlgoKind::None,
        AsymmAlgoConfig::ClassProbe => AsymmAlgoKind::ClassProbe,
    }
}

pub fn qos_label(cfg: &ScenarioConfig) -> &'static str {
    queue_mode(cfg.queue.mode).as_str()
}

pub fn algo_label(cfg: &ScenarioConfig) -> &'static str {
    algo_kind(cfg.ptp.asymm_algo).as_str()
}

fn clock_spec(c: &ClockClassConfig) -> ClockSpec {
    ClockSpec {
        kind: match c.drift.kind {
            DriftKindConfig::Constant => DriftKind::Constant,
            DriftKindConfig::RandomWalk => DriftKind::RandomWalk,
        },
        max_drift: c.drift.max_ppm * 1e-6,
        walk_sigma: c.drift.walk_sigma_ppm * 1e-6,
        walk_interval: SimTime::from_secs_f64(c.drift.walk_interval_s),
        jitter_max: SimTime::from_us_f64(c.sw_jitter_us),
        max_initial_offset: SimTime::from_us_f64(c.initial_offset_us),
    }
}

/// Node names of the configured topology, in node-id order.
pub fn node_names(cfg: &ScenarioConfig) -> Vec<String> {
    let mut names = vec!["master".to_string()];
    match cfg.topology.as_str() {
        "fig3" => {
            names.push("routerA".into());
            names.push("routerB".into());
            names.extend((1..=cfg.slaves).map(|i| format!("s{i}")));
            names.push("trafGen1".into());
            names.push("trafGen2".into());
        }
        "chain" => {
            names.push("router".into());
            names.push("s1".into());
        }
        _ => names.push("s1".into()),
    }
    names
}

fn build_topology(cfg: &ScenarioConfig) -> Topology {
    let prop_down = SimTime::from_us_f64(cfg.link.prop_us.ms);
    let prop_up = SimTime::from_us_f64(cfg.link.prop_us.sm);
    let link = Link::new(mbps_to_bps(cfg.link.rate_mbps), prop_down, prop_up);
    let gen_link = Link::new(mbps_to_bps(cfg.link.generator_rate_mbps), prop_down, prop_up);

    let mut t = Topology::default();
    let master = t.add_node("master", NodeKind::Master);
    match cfg.topology.as_str() {
        "fig3" => {
            let ra = t.add_node("routerA", NodeKind::Router);
            let rb = t.add_node("routerB", NodeKind::Router);
            t.connect(master, ra, link);
            t.connect(ra, rb, link);
            for i in 1..=cfg.slaves {
                let s = t.add_node(format!("s{i}"), NodeKind::Slave);
                t.connect(rb, s, link);
            }
            let g1 = t.add_node("trafGen1", NodeKind::Generator);
            let g2 = t.add_node("trafGen2", NodeKind::Generator);
            t.connect(ra, g1, gen_link);
            t.connect(rb, g2, gen_link);
        }
        "chain" => {
            let r = t.add_node("router", NodeKind::Router);
            let s = t.add_node("s1", NodeKind::Slave);
            t.connect(master, r, link);
            t.connect(r, s, link);
        }
        _ => {
            let s = t.add_node("s1", NodeKind::Slave);
            t.connect(master, s, link);
        }
    }
    t
}

fn packet_size(f: &crate::config::FlowConfig) -> PacketSize {
    match &f.size_mix {
        Some(mix) => PacketSize::Mix(mix.iter().map(|e| (e.bytes, e.weight)).collect()),
        None => PacketSize::Fixed(f.size_bytes),
    }
}

fn finite_at_least(v: f64, min: f64) -> bool {
    v.is_finite() && v >= min
}

/// Every violation in `cfg`, empty when it is runnable.
pub fn violations(cfg: &ScenarioConfig) -> Vec<String> {
    let mut v = Vec::new();
    let mut check = |ok: bool, msg: String| {
        if !ok {
            v.push(msg);
        }
    };

    let known_topology = TOPOLOGIES.contains(&cfg.topology.as_str());
    check(
        known_topology,
        format!("topology `{}` is not one of {}", cfg.topology, TOPOLOGIES.join(", ")),
    );
    if cfg.topology == "fig3" {
        check(cfg.slaves >= 1, "slaves must be at least 1".into());
    } else if known_topology {
        check(
            cfg.slaves == 1 || cfg.slaves == ScenarioConfig::default().slaves,
            format!("topology `{}` has exactly one slave", cfg.topology),
        );
    }

    let p = &cfg.ptp;
    check(
        p.sync_interval_s.is_finite() && p.sync_interval_s > 0.0,
        "ptp.sync_interval_s must be positive".into(),
    );
    check(
        cfg.duration_s.is_finite() && cfg.duration_s >= 10.0 * p.sync_interval_s,
        format!(
            "duration_s ({}) must cover at least 10 sync intervals ({} s)",
            cfg.duration_s,
            10.0 * p.sync_interval_s
        ),
    );
    check(
        p.timeout_intervals.is_finite() && p.timeout_intervals > 0.0,
        "ptp.timeout_intervals must be positive".into(),
    );
    check(
        (MIN_FRAME_BYTES..=MAX_FRAME_BYTES).contains(&p.probe_size_bytes),
        format!("ptp.probe_size_bytes must be in {MIN_FRAME_BYTES}..={MAX_FRAME_BYTES}"),
    );
    check(p.delay_asymmetry_us.is_finite(), "ptp.delay_asymmetry_us must be finite".into());

    for (class, c) in [
        ("master", &cfg.clocks.master),
        ("slave", &cfg.clocks.slave),
        ("router", &cfg.clocks.router),
    ] {
        check(
            finite_at_least(c.drift.max_ppm, 0.0) && c.drift.max_ppm < 1e6,
            format!("clocks.{class}.drift.max_ppm must be in [0, 1e6)"),
        );
        check(
            finite_at_least(c.drift.walk_sigma_ppm, 0.0),
            format!("clocks.{class}.drift.walk_sigma_ppm must be non-negative"),
        );
        if c.drift.kind == DriftKindConfig::RandomWalk {
            check(
                c.drift.walk_interval_s.is_finite() && c.drift.walk_interval_s > 0.0,
                format!("clocks.{class}.drift.walk_interval_s must be positive"),
            );
        }
        check(
            finite_at_least(c.sw_jitter_us, 0.0),
            format!("clocks.{class}.sw_jitter_us must be non-negative"),
        );
        check(
            finite_at_least(c.initial_offset_us, 0.0),
            format!("clocks.{class}.initial_offset_us must be non-negative"),
        );
    }

    check(
        cfg.link.rate_mbps.is_finite() && cfg.link.rate_mbps > 0.0,
        "link.rate_mbps must be positive".into(),
    );
    check(
        cfg.link.generator_rate_mbps.is_finite() && cfg.link.generator_rate_mbps > 0.0,
        "link.generator_rate_mbps must be positive".into(),
    );
    check(
        finite_at_least(cfg.link.prop_us.ms, 0.0) && finite_at_least(cfg.link.prop_us.sm, 0.0),
        "link.prop_us values must be non-negative".into(),
    );
    check(
        cfg.queue.capacity != Some(0),
        "queue.capacity must be at least 1 when set".into(),
    );
    let r = &cfg.router;
    check(
        finite_at_least(r.hop_delay_us, 0.0),
        "router.hop_delay_us must be non-negative".into(),
    );
    check(
        finite_at_least(r.injected_residence_us.ms, 0.0)
            && finite_at_least(r.injected_residence_us.sm, 0.0),
        "router.injected_residence_us values must be non-negative".into(),
    );

    let names = node_names(cfg);
    for (name, f) in &cfg.effective_flows() {
        for (key, node) in [("src", &f.src), ("dst", &f.dst)] {
            check(
                names.iter().any(|n| n == node),
                format!("traffic.{name}.{key}: unknown node `{node}`"),
            );
        }
        check(f.src != f.dst, format!("traffic.{name}: src and dst must differ"));
        check(
            finite_at_least(f.load_mbps, 0.0),
            format!("traffic.{name}.load_mbps must be non-negative"),
        );
        check(
            f.shape_a.is_finite() && f.shape_a > 1.0,
            format!("traffic.{name}.shape_a must exceed 1"),
        );
        let sizes = packet_size(f);
        check(
            sizes.validate().is_ok(),
            format!("traffic.{name}.size_mix must be non-empty with positive weights"),
        );
        check(
            sizes
                .sizes()
                .iter()
                .all(|s| (MIN_FRAME_BYTES..=MAX_FRAME_BYTES).contains(s)),
            format!("traffic.{name}: packet sizes must be in {MIN_FRAME_BYTES}..={MAX_FRAME_BYTES}"),
        );
    }

    let s = &cfg.stats;
    check(
        finite_at_least(s.sample_interval_s, 0.0),
        "stats.sample_interval_s must be non-negative".into(),
    );
    check(
        s.bin_width_ns.is_finite() && s.bin_width_ns >= 0.001,
        "stats.bin_width_ns must be at least 0.001".into(),
    );

    v
}

/// Extra violations that only matter for `sweep`: every load point must
/// map onto flows that exist.
pub fn sweep_violations(cfg: &ScenarioConfig) -> Vec<String> {
    let mut v = Vec::new();
    let sw = &cfg.sweep;
    if sw.repetitions == 0 {
        v.push("sweep.repetitions must be at least 1".into());
    }
    let points = sw.load_points();
    if points.is_empty() {
        v.push("sweep has no load points".into());
    }
    for (up, down) in points {
        if !(finite_at_least(up, 0.0) && finite_at_least(down, 0.0)) {
            v.push(format!("sweep point ({up}, {down}) has a negative load"));
        }
        if let Err(ConfigError::Invalid(msgs)) = cfg.at_load(up, down) {
            for m in msgs {
                if !v.contains(&m) {
                    v.push(m);
                }
            }
        }
    }
    v
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// `validate` plus the sweep-only checks.
    pub fn validate_sweep(&self) -> Result<(), ConfigError> {
        let mut v = violations(self);
        v.extend(sweep_violations(self));
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }
}

/// Validates `cfg` and assembles topology, parameters and flows.
pub fn build(cfg: &ScenarioConfig) -> Result<Scenario, ConfigError> {
    cfg.validate()?;
    let topology = build_topology(cfg);
    let sync_interval = SimTime::from_secs_f64(cfg.ptp.sync_interval_s);
    let params = SimParams {
        duration: SimTime::from_secs_f64(cfg.duration_s),
        queue_mode: queue_mode(cfg.queue.mode),
        queue_capacity: cfg.queue.capacity,
        hop_delay: SimTime::from_us_f64(cfg.router.hop_delay_us),
        injected_residence: [
            SimTime::from_us_f64(cfg.router.injected_residence_us.ms),
            SimTime::from_us_f64(cfg.router.injected_residence_us.sm),
        ],
        transparent_clock: cfg.router.transparent_clock,
        sync_interval,
        slave: SlaveConfig {
            delay_asymmetry: (cfg.ptp.delay_asymmetry_us * 1e6).round() as i64,
            asymm_algo: algo_kind(cfg.ptp.asymm_algo),
            probe_size: cfg.ptp.probe_size_bytes,
            exchange_timeout: SimTime::from_secs_f64(cfg.ptp.sync_interval_s * cfg.ptp.timeout_intervals),
            two_step: cfg.ptp.two_step,
        },
        sample_interval: (cfg.stats.sample_interval_s > 0.0)
            .then(|| SimTime::from_secs_f64(cfg.stats.sample_interval_s)),
        master_clock: clock_spec(&cfg.clocks.master),
        slave_clock: clock_spec(&cfg.clocks.slave),
        router_clock: if cfg.router.perfect_clock {
            ClockSpec::perfect()
        } else {
            clock_spec(&cfg.clocks.router)
        },
    };

    let mut flows = Vec::new();
    for (name, f) in cfg.effective_flows() {
        let src = topology.find(&f.src).expect("validated node");
        let dst = topology.find(&f.dst).expect("validated node");
        let flow = TrafficFlow::new(name.clone(), src, dst, packet_size(&f), f.load_mbps * 1e6, f.shape_a)
            .map_err(|e| ConfigError::Invalid(vec![format!("traffic.{name}: {e}")]))?;
        flows.push(flow);
    }

    Ok(Scenario {
        name: cfg.name.clone(),
        topology,
        params,
        flows,
    })
}
