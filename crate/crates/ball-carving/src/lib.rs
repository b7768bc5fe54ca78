//! Ball carving: clusters holding tokens and levels grow by eating
//! boundary nodes or kill them, over `2L` phases of `28L` steps, leaving
//! non-adjacent clusters that cover at least half of `S`.
//!
//! A node proposes to the neighboring non-stalling cluster of lowest level
//! below its own, or to a same-level cluster with split bit 1 when its own
//! bit is 0. A cluster accepts its `p` proposals iff `p·28L ≥ t` and grows
//! its tokens by `p`; otherwise it kills them for `14L` tokens each and
//! stalls for the rest of the phase. Stalling clusters move one level up
//! at the phase end. A cluster at level `b` is finished.

mod exec;
mod params;
mod state;
mod trace;

pub use exec::{carve_in, carve_rg_balanced_in, carve_rg_in, ColorOracle};
pub use params::{id_mark, potential, BitSource, CarveParams, Mark};
pub use state::{choose_target, CarveOutcome, CarveState, ClusterState, Proposal, Verdict, View};
pub use trace::CarveTrace;

use congest_sim::{ModelConfig, RoundMetrics, Session, SimError};
use graph_core::{Graph, IdAssignment};
use thiserror::Error;
use tree_aggregation::AggError;

#[derive(Debug, Error)]
pub enum CarveError {
    #[error("bad input: {0}")]
    Input(String),
    #[error("invariant violated: {what}\n--- trace tail ---\n{excerpt}")]
    Invariant { what: String, excerpt: String },
    #[error("coloring: {0}")]
    Coloring(String),
    #[error(transparent)]
    Agg(#[from] AggError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Carves `s` in a fresh session and returns the outcome with its rounds.
pub fn carve(
    g: &Graph,
    ids: &IdAssignment,
    s: &[usize],
    params: &CarveParams,
    cfg: ModelConfig,
) -> Result<(CarveOutcome, RoundMetrics), CarveError> {
    let mut sess = Session::new(g, ids, cfg);
    let out = carve_in(&mut sess, s, params, None)?;
    Ok((out, sess.into_metrics()))
}

/// The baseline carving in a fresh session.
pub fn carve_rg(
    g: &Graph,
    ids: &IdAssignment,
    s: &[usize],
    cfg: ModelConfig,
) -> Result<(CarveOutcome, RoundMetrics), CarveError> {
    let mut sess = Session::new(g, ids, cfg);
    let out = carve_rg_in(&mut sess, s)?;
    Ok((out, sess.into_metrics()))
}
