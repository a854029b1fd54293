//! Discrete-event kernel.
//!
//! Events are ordered by `(fire_at, seq)` where `seq` is the insertion
//! counter, so equal-time events dispatch in the order they were scheduled.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use thiserror::Error;

use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("event scheduled in the past: fire_at={fire_at} but now={now}")]
    ScheduledInPast { fire_at: SimTime, now: SimTime },
    #[error("random stream `{0}` created twice")]
    DuplicateStream(String),
}

/// Opaque handle to a scheduled event, usable for cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

struct Entry<E> {
    fire_at: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.fire_at, self.seq).cmp(&(other.fire_at, other.seq))
    }
}

/// Counters returned by [`Scheduler::run`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    pub dispatched: u64,
    pub cancelled: u64,
    pub pending: usize,
}

pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<Entry<E>>>,
    cancelled: HashSet<u64>,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Self {
        Scheduler {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            cancelled: HashSet::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending(&self) -> usize {
        self.queue.len() - self.cancelled.len()
    }

    /// Schedules `event` at absolute time `fire_at`.
    pub fn schedule(&mut self, fire_at: SimTime, event: E) -> Result<EventHandle, EngineError> {
        if fire_at < self.now {
            return Err(EngineError::ScheduledInPast {
                fire_at,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse(Entry {
            fire_at,
            seq,
            event,
        }));
        Ok(EventHandle(seq))
    }

    /// Schedules `event` after `delay`; cannot fail.
    pub fn schedule_in(&mut self, delay: SimTime, event: E) -> EventHandle {
        let at = self.now + delay;
        self.schedule(at, event)
            .expect("relative schedule is never in the past")
    }

    /// Cancels a pending event. Returns false if it was already dispatched
    /// or cancelled.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        if handle.0 >= self.next_seq {
            return false;
        }
        if !self.queue.iter().any(|Reverse(e)| e.seq == handle.0) {
            return false;
        }
        self.cancelled.insert(handle.0)
    }

    /// Dispatches every event with `fire_at <= until` in `(fire_at, seq)`
    /// order, then sets `now` to `until`. The handler may schedule further
    /// events, including at the current instant.
    pub fn run<F, Err>(&mut self, until: SimTime, mut handler: F) -> Result<RunStats, Err>
    where
        F: FnMut(&mut Scheduler<E>, E) -> Result<(), Err>,
    {
        let mut stats = RunStats::default();
        while let Some(Reverse(head)) = self.queue.peek() {
            if head.fire_at > until {
                break;
            }
            let Reverse(entry) = self.queue.pop().expect("peeked");
            if self.cancelled.remove(&entry.seq) {
                stats.cancelled += 1;
                continue;
            }
            debug_assert!(entry.fire_at >= self.now);
            self.now = entry.fire_at;
            stats.dispatched += 1;
            handler(self, entry.event)?;
        }
        if until > self.now {
            self.now = until;
        }
        stats.pending = self.pending();
        Ok(stats)
    }
}
