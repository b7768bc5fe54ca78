//! Synchronous message passing over a [`graph_core::Graph`].
//!
//! A round is: every awake node emits one optional bit string per incident
//! edge, all messages are delivered at once, then every awake node (and
//! every sleeping node that got mail) updates its state. A message sent in
//! round `r` is therefore visible to the receiver's `send` only from round
//! `r + 1` on.
//!
//! [`Session`] layers the two execution modes on top of the engine: in
//! faithful mode each primitive runs as a real protocol, in logical mode the
//! same result is computed centrally and rounds are charged by formula.

mod bits;
mod engine;
mod metrics;
mod session;

pub use bits::{gamma_len, BitReader, Bits};
pub use engine::{run_protocol, NodeCtx, NodeProgram, Outcome, Status};
pub use metrics::{charge, Mode, ModelConfig, RoundMetrics};
pub use session::{exchange_rounds, Inbox, Outbox, Session};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bandwidth exceeded in round {round} on edge {from}->{to}: {bits} bits > B = {limit}")]
    Bandwidth { round: u64, from: usize, to: usize, bits: usize, limit: u32 },
    #[error("no termination within {max_rounds} rounds ({} executed)", metrics.rounds_total)]
    Timeout { max_rounds: u64, metrics: Box<RoundMetrics> },
    #[error("rounds can only be charged in logical mode")]
    ChargeInFaithful,
    #[error("invalid configuration: {0}")]
    Config(String),
}
