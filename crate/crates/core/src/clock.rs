//! Hardware and software clocks.
//!
//! The hardware clock is a piecewise-linear function of true time whose slope
//! is `1 + drift`. The software clock reads the hardware clock and adds the
//! correction offset accumulated from PTP exchanges, plus an optional
//! processing jitter.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::rng::RngStream;
use crate::time::SimTime;

/// Local clock value in picoseconds. Signed so that offsets and differences
/// compose without casts.
pub type LocalTime = i64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClockError {
    #[error("clock read at {t} precedes anchor {anchor}")]
    BeforeAnchor { t: SimTime, anchor: SimTime },
    #[error("step_drift called on a constant drift model")]
    ConstantModel,
    #[error("drift step at {0} is not on a walk boundary")]
    OffBoundary(SimTime),
    #[error("invalid drift model: {0}")]
    InvalidModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    Constant,
    RandomWalk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftModel {
    pub kind: DriftKind,
    /// Fractional frequency error, e.g. `25e-6` for 25 ppm.
    pub initial_drift: f64,
    /// Standard deviation of each random-walk step (ratio).
    pub walk_step_sigma: f64,
    pub walk_update_interval: SimTime,
    /// `|drift|` is clamped to this bound.
    pub drift_bound: f64,
}

impl DriftModel {
    pub fn constant(drift: f64) -> Self {
        DriftModel {
            kind: DriftKind::Constant,
            initial_drift: drift,
            walk_step_sigma: 0.0,
            walk_update_interval: SimTime::ZERO,
            drift_bound: drift.abs(),
        }
    }

    pub fn perfect() -> Self {
        Self::constant(0.0)
    }

    pub fn random_walk(initial: f64, sigma: f64, interval: SimTime, bound: f64) -> Self {
        DriftModel {
            kind: DriftKind::RandomWalk,
            initial_drift: initial,
            walk_step_sigma: sigma,
            walk_update_interval: interval,
            drift_bound: bound,
        }
    }

    fn validate(&self) -> Result<(), ClockError> {
        if !(0.0..1.0).contains(&self.drift_bound) {
            return Err(ClockError::InvalidModel(format!(
                "drift bound {} outside [0, 1)",
                self.drift_bound
            )));
        }
        if self.walk_step_sigma < 0.0 || !self.walk_step_sigma.is_finite() {
            return Err(ClockError::InvalidModel("negative walk sigma".into()));
        }
        if self.kind == DriftKind::RandomWalk && self.walk_update_interval == SimTime::ZERO {
            return Err(ClockError::InvalidModel(
                "random walk needs a non-zero update interval".into(),
            ));
        }
        Ok(())
    }
}

/// A node's clock: hardware oscillator plus software correction.
#[derive(Debug, Clone)]
pub struct Clock {
    model: DriftModel,
    base_local: LocalTime,
    base_true: SimTime,
    drift: f64,
    sw_offset: i64,
    jitter_max_ps: u64,
}

impl Clock {
    /// Creates a clock whose hardware reading at true time zero is
    /// `initial_phase` picoseconds.
    pub fn new(model: DriftModel, initial_phase: LocalTime) -> Result<Self, ClockError> {
        model.validate()?;
        let drift = model.initial_drift.clamp(-model.drift_bound, model.drift_bound);
        Ok(Clock {
            model,
            base_local: initial_phase,
            base_true: SimTime::ZERO,
            drift,
            sw_offset: 0,
            jitter_max_ps: 0,
        })
    }

    pub fn perfect() -> Self {
        Clock::new(DriftModel::perfect(), 0).expect("perfect model is valid")
    }

    pub fn with_jitter(mut self, jitter_max: SimTime) -> Self {
        self.jitter_max_ps = jitter_max.as_ps();
        self
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sw_offset(&self) -> i64 {
        self.sw_offset
    }

    pub fn model(&self) -> &DriftModel {
        &self.model
    }

    pub fn hw_read(&self, t: SimTime) -> Result<LocalTime, ClockError> {
        let dt = t.checked_sub(self.base_true).ok_or(ClockError::BeforeAnchor {
            t,
            anchor: self.base_true,
        })?;
        let dt = dt.as_ps() as i64;
        // f64::round rounds half away from zero.
        let skew = (dt as f64 * self.drift).round() as i64;
        Ok(self.base_local + dt + skew)
    }

    /// Software clock without processing jitter; used for error measurement.
    pub fn sw_read_exact(&self, t: SimTime) -> Result<LocalTime, ClockError> {
        Ok(self.hw_read(t)? + self.sw_offset)
    }

    /// Software timestamp as seen by the protocol stack.
    pub fn sw_read(&self, t: SimTime, rng: &mut RngStream) -> Result<LocalTime, ClockError> {
        let base = self.sw_read_exact(t)?;
        if self.jitter_max_ps == 0 {
            return Ok(base);
        }
        Ok(base + rng.random_range(0..=self.jitter_max_ps) as i64)
    }

    /// Applies a PTP correction: `t_k <- t_k - theta`.
    pub fn apply_offset(&mut self, theta: i64) {
        self.sw_offset -= theta;
    }

    /// The first random-walk boundary strictly after `t`.
    pub fn next_walk_boundary(&self, t: SimTime) -> Option<SimTime> {
        if self.model.kind != DriftKind::RandomWalk {
            return None;
        }
        let step = self.model.walk_update_interval.as_ps();
        Some(SimTime::from_ps((t.as_ps() / step + 1) * step))
    }

    /// Random-walk update: perturbs the drift and re-anchors so the hardware
    /// reading stays continuous at `t`.
    pub fn step_drift(&mut self, t: SimTime, rng: &mut RngStream) -> Result<(), ClockError> {
        if self.model.kind != DriftKind::RandomWalk {
            return Err(ClockError::ConstantModel);
        }
        if !t.as_ps().is_multiple_of(self.model.walk_update_interval.as_ps()) {
            return Err(ClockError::OffBoundary(t));
        }
        let anchor = self.hw_read(t)?;
        self.base_local = anchor;
        self.base_true = t;
        if self.model.walk_step_sigma > 0.0 {
            let normal = Normal::new(0.0, self.model.walk_step_sigma)
                .map_err(|e| ClockError::InvalidModel(e.to_string()))?;
            let bound = self.model.drift_bound;
            self.drift = (self.drift + normal.sample(rng)).clamp(-bound, bound);
        }
        Ok(())
    }
}
