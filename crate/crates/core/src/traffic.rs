//! Heavy-tailed background traffic.
//!
//! Interarrival times follow a Pareto Type I law with shape `a` and scale
//! (minimum) `b`, whose mean is `a * b / (a - 1)`. Flows hit a target offered
//! load by choosing `b` from the mean packet size.

use thiserror::Error;

use crate::net::NodeId;
use crate::rng::RngStream;
use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("uniform draw {0} outside (0, 1]")]
    UniformOutOfRange(f64),
    #[error("pareto shape must exceed 1, got {0}")]
    InvalidShape(f64),
    #[error("pareto scale must be positive, got {0}")]
    InvalidScale(f64),
    #[error("empty or non-positive packet size mix")]
    InvalidMix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoSpec {
    shape: f64,
    scale_s: f64,
}

impl ParetoSpec {
    pub fn new(shape: f64, scale_s: f64) -> Result<Self, TrafficError> {
        if !(shape > 1.0 && shape.is_finite()) {
            return Err(TrafficError::InvalidShape(shape));
        }
        if !(scale_s > 0.0 && scale_s.is_finite()) {
            return Err(TrafficError::InvalidScale(scale_s));
        }
        Ok(ParetoSpec { shape, scale_s })
    }

    /// Spec hitting an offered load of `load_bps` with packets averaging
    /// `mean_size_bytes`. `None` when the load is zero (flow disabled).
    pub fn for_load(load_bps: f64, mean_size_bytes: f64, shape: f64) -> Result<Option<Self>, TrafficError> {
        match scale_for_load(load_bps, mean_size_bytes, shape)? {
            Some(b) => Ok(Some(ParetoSpec::new(shape, b)?)),
            None => Ok(None),
        }
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale_s
    }

    /// Mean interarrival `a * b / (a - 1)`, seconds.
    pub fn mean(&self) -> f64 {
        self.shape * self.scale_s / (self.shape - 1.0)
    }

    /// `b * (1 - p)^(-1/a)`.
    pub fn quantile(&self, p: f64) -> f64 {
        self.scale_s * (1.0 - p).powf(-1.0 / self.shape)
    }
}

/// Inverse-CDF sample `b * u^(-1/a)` for `u` in (0, 1], in seconds.
pub fn pareto_sample(spec: &ParetoSpec, u: f64) -> Result<f64, TrafficError> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(TrafficError::UniformOutOfRange(u));
    }
    Ok(spec.scale_s * u.powf(-1.0 / spec.shape))
}

/// Pareto scale (seconds) giving mean interarrival `mean_size * 8 / load`.
/// Returns `None` for a zero load.
pub fn scale_for_load(load_bps: f64, mean_size_bytes: f64, shape: f64) -> Result<Option<f64>, TrafficError> {
    if !(shape > 1.0) {
        return Err(TrafficError::InvalidShape(shape));
    }
    if load_bps <= 0.0 {
        return Ok(None);
    }
    let mean = mean_size_bytes * 8.0 / load_bps;
    Ok(Some(mean * (shape - 1.0) / shape))
}

#[derive(Debug, Clone, PartialEq)]
pub enum PacketSize {
    Fixed(u32),
    /// Discrete empirical mix of `(bytes, weight)`.
    Mix(Vec<(u32, f64)>),
}

impl PacketSize {
    pub fn mean(&self) -> f64 {
        match self {
            PacketSize::Fixed(s) => *s as f64,
            PacketSize::Mix(entries) => {
                let total: f64 = entries.iter().map(|e| e.1).sum();
                entries.iter().map(|(s, w)| *s as f64 * w).sum::<f64>() / total
            }
        }
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        match self {
            PacketSize::Fixed(_) => Ok(()),
            PacketSize::Mix(entries) => {
                if entries.is_empty() || entries.iter().any(|e| !(e.1 > 0.0)) {
                    Err(TrafficError::InvalidMix)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn sizes(&self) -> Vec<u32> {
        match self {
            PacketSize::Fixed(s) => vec![*s],
            PacketSize::Mix(entries) => entries.iter().map(|e| e.0).collect(),
        }
    }

    fn sample(&self, rng: &mut RngStream) -> u32 {
        match self {
            PacketSize::Fixed(s) => *s,
            PacketSize::Mix(entries) => {
                let total: f64 = entries.iter().map(|e| e.1).sum();
                let mut x = rng.unit_open_closed() * total;
                for (size, w) in entries {
                    if x <= *w {
                        return *size;
                    }
                    x -= w;
                }
                entries.last().expect("validated non-empty").0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NextPacket {
    pub delta: SimTime,
    pub size_bytes: u32,
    pub dst: NodeId,
}

/// A unidirectional background flow between two generators.
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficFlow {
    pub name: String,
    pub src: NodeId,
    pub dst: NodeId,
    pub size: PacketSize,
    pub target_load_bps: f64,
    /// `None` when the flow is disabled.
    pub spec: Option<ParetoSpec>,
}

impl TrafficFlow {
    pub fn new(
        name: impl Into<String>,
        src: NodeId,
        dst: NodeId,
        size: PacketSize,
        target_load_bps: f64,
        shape: f64,
    ) -> Result<Self, TrafficError> {
        size.validate()?;
        let spec = ParetoSpec::for_load(target_load_bps, size.mean(), shape)?;
        Ok(TrafficFlow {
            name: name.into(),
            src,
            dst,
            size,
            target_load_bps,
            spec,
        })
    }

    pub fn enabled(&self) -> bool {
        self.spec.is_some()
    }

    /// Interarrival gap and size of the next packet; `None` for a disabled flow.
    pub fn next_packet(&self, rng: &mut RngStream) -> Option<NextPacket> {
        let spec = self.spec.as_ref()?;
        let u = rng.unit_open_closed();
        let gap = pareto_sample(spec, u).expect("u in (0, 1]");
        let size_bytes = self.size.sample(rng);
        Some(NextPacket {
            delta: SimTime::from_secs_f64(gap),
            size_bytes,
            dst: self.dst,
        })
    }
}
