use std::collections::BTreeMap;

use log::debug;
use thiserror::Error;

use crate::clock::LocalTime;
use crate::time::SimTime;

use super::algo::{AsymmAlgo, AsymmAlgoKind};
use super::message::{MessageKind, PtpMessage};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PtpError {
    #[error("exchange {0} is incomplete")]
    Incomplete(u16),
    #[error("no pending exchange for {kind:?} seq {seq}")]
    NoMatchingRecord { kind: MessageKind, seq: u16 },
    #[error("unexpected {0:?} message")]
    UnexpectedKind(MessageKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeState {
    AwaitFollowUp,
    AwaitDelayResp,
    Complete,
    TimedOut,
}

/// One Sync / Delay_req round as seen by a slave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeRecord {
    pub seq_id: u16,
    pub t1: Option<LocalTime>,
    pub t2: LocalTime,
    pub t3: Option<LocalTime>,
    pub t4: Option<LocalTime>,
    /// Correction carried by the Sync path.
    pub c_ms: i64,
    /// Correction carried by the Delay_req path.
    pub c_sm: i64,
    pub state: ExchangeState,
}

impl ExchangeRecord {
    pub fn complete(seq_id: u16, t: [LocalTime; 4], c_ms: i64, c_sm: i64) -> Self {
        ExchangeRecord {
            seq_id,
            t1: Some(t[0]),
            t2: t[1],
            t3: Some(t[2]),
            t4: Some(t[3]),
            c_ms,
            c_sm,
            state: ExchangeState::Complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlaveConfig {
    /// `(d_ms - d_sm) / 2` in picoseconds.
    pub delay_asymmetry: i64,
    pub asymm_algo: AsymmAlgoKind,
    pub probe_size: u32,
    pub exchange_timeout: SimTime,
    pub two_step: bool,
}

impl Default for SlaveConfig {
    fn default() -> Self {
        SlaveConfig {
            delay_asymmetry: 0,
            asymm_algo: AsymmAlgoKind::None,
            probe_size: 1000,
            exchange_timeout: SimTime::from_ms(400),
            two_step: true,
        }
    }
}

/// Offset estimate of the slave relative to the master:
/// `((T2 - T1 - c_ms) - (T4 - T3 - c_sm)) / 2 - delay_asymmetry`,
/// truncated toward zero.
pub fn compute_offset(r: &ExchangeRecord, cfg: &SlaveConfig) -> Result<i64, PtpError> {
    let (Some(t1), Some(t3), Some(t4)) = (r.t1, r.t3, r.t4) else {
        return Err(PtpError::Incomplete(r.seq_id));
    };
    let downstream = r.t2 - t1 - r.c_ms;
    let upstream = t4 - t3 - r.c_sm;
    Ok((downstream - upstream) / 2 - cfg.delay_asymmetry)
}

/// What the slave application does after a Sync arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncAction {
    SendDelayReq(u16),
    AwaitFollowUp,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlaveCounters {
    pub completed: u64,
    pub timed_out: u64,
    pub replaced: u64,
    pub dropped: u64,
}

/// Slave-side PTP state machine. Timestamps are supplied by the caller in the
/// slave's software timescale.
pub struct SlaveStateMachine {
    cfg: SlaveConfig,
    records: BTreeMap<u16, ExchangeRecord>,
    algo: Box<dyn AsymmAlgo>,
    counters: SlaveCounters,
}

impl SlaveStateMachine {
    pub fn new(cfg: SlaveConfig) -> Self {
        let algo = cfg.asymm_algo.build(cfg.probe_size);
        SlaveStateMachine {
            cfg,
            records: BTreeMap::new(),
            algo,
            counters: SlaveCounters::default(),
        }
    }

    pub fn config(&self) -> &SlaveConfig {
        &self.cfg
    }

    pub fn counters(&self) -> SlaveCounters {
        self.counters
    }

    pub fn record(&self, seq: u16) -> Option<&ExchangeRecord> {
        self.records.get(&seq)
    }

    pub fn pending(&self) -> usize {
        self.records.len()
    }

    /// Extra frames (sizes) to send ahead of a PTP message of `kind`.
    pub fn frames_before(&mut self, kind: MessageKind) -> Vec<u32> {
        self.algo.frames_before(kind)
    }

    pub fn on_sync(&mut self, msg: &PtpMessage, t2: LocalTime) -> Result<SyncAction, PtpError> {
        if msg.kind != MessageKind::Sync {
            return Err(PtpError::UnexpectedKind(msg.kind));
        }
        let (t1, state, action) = if self.cfg.two_step {
            (None, ExchangeState::AwaitFollowUp, SyncAction::AwaitFollowUp)
        } else {
            (
                Some(msg.origin_ts),
                ExchangeState::AwaitDelayResp,
                SyncAction::SendDelayReq(msg.seq_id),
            )
        };
        let record = ExchangeRecord {
            seq_id: msg.seq_id,
            t1,
            t2,
            t3: None,
            t4: None,
            c_ms: msg.correction,
            c_sm: 0,
            state,
        };
        if self.records.insert(msg.seq_id, record).is_some() {
            debug!("sync seq {} replaced a pending exchange", msg.seq_id);
            self.counters.replaced += 1;
        }
        Ok(action)
    }

    /// Returns the sequence id for which a Delay_req must now be sent.
    pub fn on_follow_up(&mut self, msg: &PtpMessage) -> Result<u16, PtpError> {
        if msg.kind != MessageKind::FollowUp {
            return Err(PtpError::UnexpectedKind(msg.kind));
        }
        match self.records.get_mut(&msg.seq_id) {
            Some(r) if r.state == ExchangeState::AwaitFollowUp => {
                r.t1 = Some(msg.origin_ts);
                r.state = ExchangeState::AwaitDelayResp;
                Ok(msg.seq_id)
            }
            _ => {
                self.counters.dropped += 1;
                Err(PtpError::NoMatchingRecord {
                    kind: msg.kind,
                    seq: msg.seq_id,
                })
            }
        }
    }

    /// Records T3 once the Delay_req's first bit leaves the port.
    pub fn on_delay_req_egress(&mut self, seq: u16, t3: LocalTime) -> Result<(), PtpError> {
        match self.records.get_mut(&seq) {
            Some(r) if r.state == ExchangeState::AwaitDelayResp => {
                r.t3 = Some(t3);
                Ok(())
            }
            _ => Err(PtpError::NoMatchingRecord {
                kind: MessageKind::DelayReq,
                seq,
            }),
        }
    }

    /// Completes an exchange and returns the offset to apply.
    pub fn on_delay_resp(&mut self, msg: &PtpMessage) -> Result<i64, PtpError> {
        if msg.kind != MessageKind::DelayResp {
            return Err(PtpError::UnexpectedKind(msg.kind));
        }
        let ready = matches!(
            self.records.get(&msg.seq_id),
            Some(r) if r.state == ExchangeState::AwaitDelayResp && r.t3.is_some()
        );
        if !ready {
            self.counters.dropped += 1;
            return Err(PtpError::NoMatchingRecord {
                kind: msg.kind,
                seq: msg.seq_id,
            });
        }
        let mut record = self.records.remove(&msg.seq_id).expect("checked above");
        record.t4 = Some(msg.recv_ts);
        record.c_sm = msg.correction;
        record.state = ExchangeState::Complete;
        let theta = compute_offset(&record, &self.cfg)?;
        self.algo.on_exchange_complete(&record);
        self.counters.completed += 1;
        Ok(theta)
    }

    /// Returns true if the exchange was still open and is now timed out.
    pub fn on_timeout(&mut self, seq: u16) -> bool {
        match self.records.get(&seq) {
            Some(r) if r.state != ExchangeState::Complete => {
                self.records.remove(&seq);
                self.counters.timed_out += 1;
                true
            }
            _ => false,
        }
    }
}

/// Master-side PTP state machine.
pub struct MasterStateMachine {
    two_step: bool,
    next_seq: u16,
    algo: Box<dyn AsymmAlgo>,
}

impl MasterStateMachine {
    pub fn new(two_step: bool, algo: AsymmAlgoKind, probe_size: u32) -> Self {
        MasterStateMachine {
            two_step,
            next_seq: 0,
            algo: algo.build(probe_size),
        }
    }

    pub fn two_step(&self) -> bool {
        self.two_step
    }

    /// Allocates the sequence id for the next Sync round.
    pub fn next_sync_seq(&mut self) -> u16 {
        let seq = self.next_seq;
        self.next_seq = self.next_seq.wrapping_add(1);
        seq
    }

    pub fn frames_before(&mut self, kind: MessageKind) -> Vec<u32> {
        self.algo.frames_before(kind)
    }

    /// Builds the Delay_resp for a Delay_req received at local time `t4`.
    pub fn on_delay_req(&self, msg: &PtpMessage, t4: LocalTime) -> Result<PtpMessage, PtpError> {
        if msg.kind != MessageKind::DelayReq {
            return Err(PtpError::UnexpectedKind(msg.kind));
        }
        Ok(PtpMessage::delay_resp(msg.seq_id, t4, msg.correction))
    }
}
