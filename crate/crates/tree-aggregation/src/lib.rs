//! Pipelined aggregation over rooted trees that may share edges.
//!
//! All trees of one call run on a single global schedule sized by the
//! largest depth `r`; each tree gets `b' = ⌊B/P⌋` bits per edge per round.
//! Upward operations stream depth-staggered chunks toward the root,
//! downward ones stream from it. Logical mode computes the same results
//! centrally and charges the schedule's exact length.
//!
//! Round costs (all `0` when `r = 0`):
//!
//! | operation    | rounds                              |
//! |--------------|-------------------------------------|
//! | sum          | `r - 1 + ⌈M/b'⌉`, `M = m + ⌈log2 size⌉ + 1` |
//! | min          | `r - 1 + ⌈m/b'⌉`                    |
//! | broadcast    | `r - 1 + ⌈m/b'⌉`, any `m` for the bit-string form |
//! | convergecast | `r - 1 + ⌈cap·(m+1)/b'⌉`            |

mod ops;
mod plan;
mod schedule;
mod tree;

pub use ops::{
    broadcast_rounds, chunks, convergecast_rounds, min_rounds, pipelined_broadcast, pipelined_broadcast_bits,
    pipelined_convergecast,
    pipelined_min, pipelined_sum, round_bound, sum_rounds, sum_width, Aggregate, C_0, C_S,
};
pub use plan::{plan_channels, ChannelPlan};
pub use tree::RootedTree;

use congest_sim::SimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AggError {
    #[error("{p} trees share an edge but B = {bandwidth}: cannot give each tree one bit")]
    Overlap { p: usize, bandwidth: u32 },
    #[error("tree {tree}, position {pos}: value {value} does not fit {m} bits")]
    ValueTooLarge { tree: usize, pos: usize, value: u64, m: u32 },
    #[error("malformed tree: {0}")]
    Tree(String),
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}
