use crate::time::{SimTime, PS_PER_S};

/// Direction on a link. `Down` runs from the master side toward the slaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Down,
    Up,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        }
    }
}

/// Timing of one transmission on a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transmission {
    /// Last bit leaves the sender; the port is free again.
    pub tx_end: SimTime,
    /// Last bit reaches the receiver.
    pub arrival: SimTime,
}

/// Full-duplex point-to-point link. The two directions have independent
/// transmitters and never contend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub rate_bps: u64,
    pub prop_down: SimTime,
    pub prop_up: SimTime,
}

impl Link {
    pub fn new(rate_bps: u64, prop_down: SimTime, prop_up: SimTime) -> Self {
        assert!(rate_bps > 0, "link rate must be positive");
        Link {
            rate_bps,
            prop_down,
            prop_up,
        }
    }

    pub fn symmetric(rate_bps: u64, prop: SimTime) -> Self {
        Link::new(rate_bps, prop, prop)
    }

    /// `size * 8 / rate`, rounded to the nearest picosecond.
    pub fn serialization(&self, size_bytes: u32) -> SimTime {
        let num = size_bytes as u128 * 8 * PS_PER_S as u128;
        let rate = self.rate_bps as u128;
        SimTime::from_ps(((num + rate / 2) / rate) as u64)
    }

    pub fn prop_delay(&self, dir: Direction) -> SimTime {
        match dir {
            Direction::Down => self.prop_down,
            Direction::Up => self.prop_up,
        }
    }

    pub fn transmit(&self, size_bytes: u32, start: SimTime, dir: Direction) -> Transmission {
        let tx_end = start + self.serialization(size_bytes);
        Transmission {
            tx_end,
            arrival: tx_end + self.prop_delay(dir),
        }
    }
}
