use crate::clock::LocalTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Sync,
    FollowUp,
    DelayReq,
    DelayResp,
}

impl MessageKind {
    /// Event messages are timestamped on the wire.
    pub fn is_event(self) -> bool {
        matches!(self, MessageKind::Sync | MessageKind::DelayReq)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PtpMessage {
    pub kind: MessageKind,
    pub seq_id: u16,
    /// T1 (precise in FollowUp and one-step Sync, an estimate in two-step Sync).
    pub origin_ts: LocalTime,
    /// T4, DelayResp only.
    pub recv_ts: LocalTime,
    /// Accumulated residence time, picoseconds.
    pub correction: i64,
    pub domain: u8,
}

impl PtpMessage {
    fn new(kind: MessageKind, seq_id: u16) -> Self {
        PtpMessage {
            kind,
            seq_id,
            origin_ts: 0,
            recv_ts: 0,
            correction: 0,
            domain: 0,
        }
    }

    pub fn sync(seq_id: u16, origin_ts: LocalTime) -> Self {
        PtpMessage {
            origin_ts,
            ..Self::new(MessageKind::Sync, seq_id)
        }
    }

    pub fn follow_up(seq_id: u16, precise_origin_ts: LocalTime) -> Self {
        PtpMessage {
            origin_ts: precise_origin_ts,
            ..Self::new(MessageKind::FollowUp, seq_id)
        }
    }

    pub fn delay_req(seq_id: u16) -> Self {
        Self::new(MessageKind::DelayReq, seq_id)
    }

    pub fn delay_resp(seq_id: u16, recv_ts: LocalTime, correction: i64) -> Self {
        PtpMessage {
            recv_ts,
            correction,
            ..Self::new(MessageKind::DelayResp, seq_id)
        }
    }
}
