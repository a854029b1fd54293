use std::collections::VecDeque;

use crate::time::SimTime;

use super::frame::{Frame, TrafficClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueueMode {
    Fifo,
    Priority,
}

impl QueueMode {
    pub fn as_str(self) -> &'static str {
        match self {
            QueueMode::Fifo => "fifo",
            QueueMode::Priority => "priority",
        }
    }
}

#[derive(Debug)]
pub enum EnqueueOutcome {
    /// The port was idle: the caller starts transmitting this frame now.
    TransmitNow(Frame),
    Queued,
    Dropped(Frame),
}

/// Egress queue of one port. Transmission is non-preemptive: once a frame
/// starts it holds the port until `busy_until`.
#[derive(Debug)]
pub struct PortQueue {
    mode: QueueMode,
    /// Used only in priority mode.
    high_q: VecDeque<Frame>,
    /// The single queue in FIFO mode.
    low_q: VecDeque<Frame>,
    queued: [usize; 2],
    capacity: Option<usize>,
    busy_until: Option<SimTime>,
    drops: [u64; 2],
}

impl PortQueue {
    pub fn new(mode: QueueMode, capacity: Option<usize>) -> Self {
        PortQueue {
            mode,
            high_q: VecDeque::new(),
            low_q: VecDeque::new(),
            queued: [0; 2],
            capacity,
            busy_until: None,
            drops: [0; 2],
        }
    }

    pub fn mode(&self) -> QueueMode {
        self.mode
    }

    pub fn is_busy(&self) -> bool {
        self.busy_until.is_some()
    }

    pub fn busy_until(&self) -> Option<SimTime> {
        self.busy_until
    }

    pub fn len(&self) -> usize {
        self.high_q.len() + self.low_q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn queued(&self, class: TrafficClass) -> usize {
        self.queued[class.index()]
    }

    pub fn drops(&self, class: TrafficClass) -> u64 {
        self.drops[class.index()]
    }

    pub fn enqueue(&mut self, frame: Frame) -> EnqueueOutcome {
        if !self.is_busy() && self.is_empty() {
            return EnqueueOutcome::TransmitNow(frame);
        }
        let class = frame.class;
        if let Some(cap) = self.capacity {
            if self.queued[class.index()] >= cap {
                self.drops[class.index()] += 1;
                return EnqueueOutcome::Dropped(frame);
            }
        }
        self.queued[class.index()] += 1;
        match (self.mode, class) {
            (QueueMode::Priority, TrafficClass::High) => self.high_q.push_back(frame),
            _ => self.low_q.push_back(frame),
        }
        EnqueueOutcome::Queued
    }

    /// Next frame to send once the port is idle: strict priority in priority
    /// mode, arrival order in FIFO mode.
    pub fn dequeue_next(&mut self) -> Option<Frame> {
        let frame = self.high_q.pop_front().or_else(|| self.low_q.pop_front())?;
        self.queued[frame.class.index()] -= 1;
        Some(frame)
    }

    /// Marks the port busy with a transmission ending at `end`.
    pub fn start_transmission(&mut self, end: SimTime) {
        debug_assert!(self.busy_until.is_none(), "port already transmitting");
        self.busy_until = Some(end);
    }

    pub fn finish_transmission(&mut self) {
        self.busy_until = None;
    }
}
