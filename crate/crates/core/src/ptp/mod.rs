//! PTP master and slave applications.

mod algo;
mod exchange;
mod message;

pub use algo::{AsymmAlgo, AsymmAlgoKind, ClassProbe, NoAlgo};
pub use exchange::{
    compute_offset, ExchangeRecord, ExchangeState, MasterStateMachine, PtpError, SlaveConfig,
    SlaveCounters, SlaveStateMachine, SyncAction,
};
pub use message::{MessageKind, PtpMessage};
