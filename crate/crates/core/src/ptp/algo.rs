//! Asymmetry mitigation plugin slot.

use std::fmt;
use std::str::FromStr;

use super::exchange::ExchangeRecord;
use super::message::MessageKind;

/// A hook run by both master and slave applications.
///
/// Implementations can inject extra low-priority frames ahead of each PTP
/// event message and observe completed exchanges.
pub trait AsymmAlgo: Send {
    fn name(&self) -> &'static str;

    /// Sizes (bytes) of extra frames to enqueue, in order, immediately ahead
    /// of an outgoing PTP message of `kind` on the same egress port.
    fn frames_before(&mut self, kind: MessageKind) -> Vec<u32>;

    fn on_exchange_complete(&mut self, _record: &ExchangeRecord) {}
}

/// Plain IEEE 1588 behaviour.
#[derive(Debug, Default)]
pub struct NoAlgo;

impl AsymmAlgo for NoAlgo {
    fn name(&self) -> &'static str {
        "none"
    }

    fn frames_before(&mut self, _kind: MessageKind) -> Vec<u32> {
        Vec::new()
    }
}

/// Class probing: one low-priority frame right before every event message,
/// so both directions are equally likely to find a non-PTP frame in service.
#[derive(Debug)]
pub struct ClassProbe {
    pub probe_size: u32,
    pub probes_sent: u64,
}

impl ClassProbe {
    pub fn new(probe_size: u32) -> Self {
        ClassProbe {
            probe_size,
            probes_sent: 0,
        }
    }
}

impl AsymmAlgo for ClassProbe {
    fn name(&self) -> &'static str {
        "class_probe"
    }

    fn frames_before(&mut self, kind: MessageKind) -> Vec<u32> {
        if kind.is_event() {
            self.probes_sent += 1;
            vec![self.probe_size]
        } else {
            Vec::new()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymmAlgoKind {
    None,
    ClassProbe,
}

impl AsymmAlgoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AsymmAlgoKind::None => "none",
            AsymmAlgoKind::ClassProbe => "class_probe",
        }
    }

    pub fn build(self, probe_size: u32) -> Box<dyn AsymmAlgo> {
        match self {
            AsymmAlgoKind::None => Box::new(NoAlgo),
            AsymmAlgoKind::ClassProbe => Box::new(ClassProbe::new(probe_size)),
        }
    }
}

impl fmt::Display for AsymmAlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AsymmAlgoKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(AsymmAlgoKind::None),
            "class_probe" => Ok(AsymmAlgoKind::ClassProbe),
            other => Err(format!("unknown asymmetry algorithm `{other}`")),
        }
    }
}
