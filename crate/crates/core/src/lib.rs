//! Deterministic discrete-event simulator for IEEE 1588 (PTP) clock
//! synchronization over a switched packet network.

pub mod clock;
pub mod config;
pub mod engine;
pub mod net;
pub mod ptp;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod sim;
pub mod stats;
pub mod time;
pub mod traffic;

pub use time::SimTime;
