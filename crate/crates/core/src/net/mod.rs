//! Frames, links, egress queues and routing.

mod frame;
mod link;
mod queue;
mod routing;

pub use frame::{
    classify, Frame, NodeId, Payload, TrafficClass, BACKGROUND_PORT, MAX_FRAME_BYTES,
    MIN_FRAME_BYTES, PROBE_PORT, PTP_EVENT_PORT, PTP_FRAME_BYTES, PTP_GENERAL_PORT,
};
pub use link::{Direction, Link, Transmission};
pub use queue::{EnqueueOutcome, PortQueue, QueueMode};
pub use routing::{shortest_path_tables, RoutingTable};
