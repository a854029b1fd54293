//! Scenario configuration (TOML).
//!
//! Every table is optional; missing keys take the defaults below. Unknown
//! keys are rejected so typos surface at validation time.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    /// `fig3`, `pair` (master and one slave on a single link) or `chain`
    /// (master, one router, one slave).
    pub topology: String,
    pub slaves: usize,
    pub duration_s: f64,
    pub seed: u64,
    pub clocks: ClockClasses,
    pub link: LinkConfig,
    pub queue: QueueConfig,
    pub router: RouterConfig,
    pub ptp: PtpConfig,
    pub traffic: BTreeMap<String, FlowConfig>,
    pub stats: StatsConfig,
    pub sweep: SweepConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: "scenario".into(),
            topology: "fig3".into(),
            slaves: 10,
            duration_s: 60.0,
            seed: 1,
            clocks: ClockClasses::default(),
            link: LinkConfig::default(),
            queue: QueueConfig::default(),
            router: RouterConfig::default(),
            ptp: PtpConfig::default(),
            traffic: BTreeMap::new(),
            stats: StatsConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockClasses {
    pub master: ClockClassConfig,
    pub slave: ClockClassConfig,
    pub router: ClockClassConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClockClassConfig {
    pub drift: DriftConfig,
    pub sw_jitter_us: f64,
    /// Initial hardware phase drawn uniformly in `±initial_offset_us`.
    pub initial_offset_us: f64,
}

impl Default for ClockClassConfig {
    fn default() -> Self {
        ClockClassConfig {
            drift: DriftConfig::default(),
            sw_jitter_us: 0.0,
            initial_offset_us: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKindConfig {
    Constant,
    #[serde(alias = "random-walk")]
    RandomWalk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftConfig {
    pub kind: DriftKindConfig,
    pub max_ppm: f64,
    pub walk_sigma_ppm: f64,
    pub walk_interval_s: f64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            kind: DriftKindConfig::Constant,
            max_ppm: 25.0,
            walk_sigma_ppm: 0.1,
            walk_interval_s: 1.0,
        }
    }
}

/// Per-direction value: `ms` is master to slave, `sm` slave to master.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerDirection {
    pub ms: f64,
    pub sm: f64,
}

impl PerDirection {
    pub fn both(v: f64) -> Self {
        PerDirection { ms: v, sm: v }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkConfig {
    pub rate_mbps: f64,
    pub prop_us: PerDirection,
    /// Access link rate of traffic generators.
    pub generator_rate_mbps: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            rate_mbps: 100.0,
            prop_us: PerDirection::both(5.0),
            generator_rate_mbps: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueueModeConfig {
    Fifo,
    Priority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QueueConfig {
    pub mode: QueueModeConfig,
    /// Frames per class; unbounded when absent.
    pub capacity: Option<usize>,
}

impl Default for QueueConfig {
    fn default() -> Self {
        QueueConfig {
            mode: QueueModeConfig::Fifo,
            capacity: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RouterConfig {
    pub hop_delay_us: f64,
    pub transparent_clock: bool,
    /// Routers timestamp residence with a drift-free clock.
    pub perfect_clock: bool,
    /// Fixed extra dwell added at every router, per direction.
    pub injected_residence_us: PerDirection,
}

impl Default for RouterConfig {
    fn default() -> Self {
        RouterConfig {
            hop_delay_us: 5.0,
            transparent_clock: false,
            perfect_clock: false,
            injected_residence_us: PerDirection::both(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymmAlgoConfig {
    None,
    ClassProbe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PtpConfig {
    pub sync_interval_s: f64,
    pub two_step: bool,
    pub asymm_algo: AsymmAlgoConfig,
    pub probe_size_bytes: u32,
    pub delay_asymmetry_us: f64,
    pub timeout_intervals: f64,
}

impl Default for PtpConfig {
    fn default() -> Self {
        PtpConfig {
            sync_interval_s: 0.2,
            two_step: true,
            asymm_algo: AsymmAlgoConfig::None,
            probe_size_bytes: 1000,
            delay_asymmetry_us: 0.0,
            timeout_intervals: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeWeight {
    pub bytes: u32,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub src: String,
    pub dst: String,
    pub load_mbps: f64,
    pub size_bytes: u32,
    /// Overrides `size_bytes` with a discrete mix when present.
    pub size_mix: Option<Vec<SizeWeight>>,
    pub shape_a: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            src: String::new(),
            dst: String::new(),
            load_mbps: 0.0,
            size_bytes: 1000,
            size_mix: None,
            shape_a: 1.5,
        }
    }
}

impl FlowConfig {
    pub fn new(src: &str, dst: &str, load_mbps: f64) -> Self {
        FlowConfig {
            src: src.into(),
            dst: dst.into(),
            load_mbps,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    /// Periodic error sampling; 0 disables it.
    pub sample_interval_s: f64,
    pub bin_width_ns: f64,
    /// Adds a true-time-referenced column to the vector file.
    pub true_time_columns: bool,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            sample_interval_s: 0.1,
            bin_width_ns: 1000.0,
            true_time_columns: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub base_seed: u64,
    pub repetitions: u32,
    /// Grid axes, used when `points` is empty.
    pub up_mbps: Vec<f64>,
    pub down_mbps: Vec<f64>,
    /// Explicit `[up, down]` pairs.
    pub points: Vec<[f64; 2]>,
    pub up_flow: String,
    pub down_flow: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let axis: Vec<f64> = (0..10).map(|i| 10.0 * i as f64).collect();
        SweepConfig {
            base_seed: 1,
            repetitions: 15,
            up_mbps: axis.clone(),
            down_mbps: axis,
            points: Vec::new(),
            up_flow: "up".into(),
            down_flow: "down".into(),
        }
    }
}

impl SweepConfig {
    /// `(up, down)` load points in sweep order.
    pub fn load_points(&self) -> Vec<(f64, f64)> {
        if !self.points.is_empty() {
            return self.points.iter().map(|p| (p[0], p[1])).collect();
        }
        let mut out = Vec::with_capacity(self.up_mbps.len() * self.down_mbps.len());
        for &up in &self.up_mbps {
            for &down in &self.down_mbps {
                out.push((up, down));
            }
        }
        out
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Canonical two-router scenario with ten slaves and both background
    /// flows present (at zero load).
    pub fn fig3(name: &str) -> Self {
        let mut cfg = ScenarioConfig {
            name: name.into(),
            ..Default::default()
        };
        cfg.traffic
            .insert("down".into(), FlowConfig::new("trafGen1", "trafGen2", 0.0));
        cfg.traffic
            .insert("up".into(), FlowConfig::new("trafGen2", "trafGen1", 0.0));
        cfg
    }

    /// Flows after filling in the fig3 defaults for any missing `up`/`down`.
    pub fn effective_flows(&self) -> BTreeMap<String, FlowConfig> {
        let mut flows = self.traffic.clone();
        if self.topology == "fig3" {
            flows
                .entry("down".into())
                .or_insert_with(|| FlowConfig::new("trafGen1", "trafGen2", 0.0));
            flows
                .entry("up".into())
                .or_insert_with(|| FlowConfig::new("trafGen2", "trafGen1", 0.0));
        }
        flows
    }

    pub fn flow_load(&self, flow: &str) -> f64 {
        self.effective_flows().get(flow).map_or(0.0, |f| f.load_mbps)
    }

    pub fn up_mbps(&self) -> f64 {
        self.flow_load(&self.sweep.up_flow)
    }

    pub fn down_mbps(&self) -> f64 {
        self.flow_load(&self.sweep.down_flow)
    }

    /// Copy of this config with the sweep flows set to the given loads.
    pub fn at_load(&self, up_mbps: f64, down_mbps: f64) -> Result<Self, ConfigError> {
        let mut cfg = self.clone();
        cfg.traffic = self.effective_flows();
        let mut problems = Vec::new();
        for (flow, load) in [(&self.sweep.up_flow, up_mbps), (&self.sweep.down_flow, down_mbps)] {
            match cfg.traffic.get_mut(flow) {
                Some(f) => f.load_mbps = load,
                None if load == 0.0 => {}
                None => problems.push(format!("sweep flow `{flow}` is not defined in [traffic]")),
            }
        }
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError::Invalid(problems))
        }
    }
}
