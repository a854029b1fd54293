use std::fmt;

use crate::clock::LocalTime;
use crate::ptp::{MessageKind, PtpMessage};

pub const PTP_EVENT_PORT: u16 = 319;
pub const PTP_GENERAL_PORT: u16 = 320;
pub const BACKGROUND_PORT: u16 = 9000;
pub const PROBE_PORT: u16 = 9001;

/// On-wire size shared by all four PTP message kinds.
pub const PTP_FRAME_BYTES: u32 = 90;
pub const MIN_FRAME_BYTES: u32 = 64;
pub const MAX_FRAME_BYTES: u32 = 1518;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrafficClass {
    High,
    Low,
}

impl TrafficClass {
    pub fn index(self) -> usize {
        match self {
            TrafficClass::High => 0,
            TrafficClass::Low => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Ptp(PtpMessage),
    Background,
    Probe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub id: u64,
    pub size_bytes: u32,
    pub class: TrafficClass,
    pub src: NodeId,
    pub dst: NodeId,
    /// UDP destination port; `None` models an unparseable header stack.
    pub udp_dst_port: Option<u16>,
    pub payload: Payload,
    /// Local ingress time recorded by a transparent-clock router.
    pub ingress_stamp: Option<LocalTime>,
}

impl Frame {
    pub fn new(id: u64, src: NodeId, dst: NodeId, size_bytes: u32, payload: Payload) -> Self {
        let udp_dst_port = Some(match &payload {
            Payload::Ptp(m) if m.kind.is_event() => PTP_EVENT_PORT,
            Payload::Ptp(_) => PTP_GENERAL_PORT,
            Payload::Background => BACKGROUND_PORT,
            Payload::Probe => PROBE_PORT,
        });
        let mut frame = Frame {
            id,
            size_bytes,
            class: TrafficClass::Low,
            src,
            dst,
            udp_dst_port,
            payload,
            ingress_stamp: None,
        };
        frame.class = classify(&frame);
        frame
    }

    pub fn ptp(id: u64, src: NodeId, dst: NodeId, msg: PtpMessage) -> Self {
        Frame::new(id, src, dst, PTP_FRAME_BYTES, Payload::Ptp(msg))
    }

    pub fn ptp_message(&self) -> Option<&PtpMessage> {
        match &self.payload {
            Payload::Ptp(m) => Some(m),
            _ => None,
        }
    }

    pub fn ptp_message_mut(&mut self) -> Option<&mut PtpMessage> {
        match &mut self.payload {
            Payload::Ptp(m) => Some(m),
            _ => None,
        }
    }

    pub fn ptp_kind(&self) -> Option<MessageKind> {
        self.ptp_message().map(|m| m.kind)
    }
}

/// Deep packet inspection: PTP event and general ports map to the high class.
pub fn classify(frame: &Frame) -> TrafficClass {
    match frame.udp_dst_port {
        Some(PTP_EVENT_PORT) | Some(PTP_GENERAL_PORT) => TrafficClass::High,
        _ => TrafficClass::Low,
    }
}
