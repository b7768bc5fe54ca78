use graph_core::{Graph, IdAssignment};
use rayon::prelude::*;

use crate::{Bits, Mode, ModelConfig, RoundMetrics, SimError};

/// Node counts at or above this evaluate each round in parallel.
const PAR_THRESHOLD: usize = 1024;

/// What a node knows about itself at start-up. Per-node knowledge beyond
/// this (parent ports, inputs) lives in the program value, indexed by node.
#[derive(Clone, Copy, Debug)]
pub struct NodeCtx {
    pub index: usize,
    pub id: u64,
    pub degree: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Running,
    /// Idle until the given round (inclusive) unless a message arrives first.
    SleepUntil(u64),
    Halted,
}

/// A synchronous node program. Messages are addressed by port (position in
/// the sorted adjacency list). `send` sees the state after the previous
/// round's `receive`, so a message sent in round `r` can influence the
/// receiver's messages from round `r + 1` on.
pub trait NodeProgram: Sync {
    type State: Send + Sync;
    type Output;

    fn init(&self, ctx: &NodeCtx) -> Self::State;
    fn send(&self, ctx: &NodeCtx, round: u64, state: &Self::State) -> Vec<(usize, Bits)>;
    fn receive(&self, ctx: &NodeCtx, round: u64, state: &mut Self::State, inbox: &[(usize, Bits)]) -> Status;
    fn output(&self, ctx: &NodeCtx, state: Self::State) -> Self::Output;
}

#[derive(Debug)]
pub struct Outcome<O> {
    pub outputs: Vec<O>,
    pub metrics: RoundMetrics,
}

fn awake(s: Status, round: u64) -> bool {
    match s {
        Status::Running => true,
        Status::SleepUntil(w) => w <= round,
        Status::Halted => false,
    }
}

/// Runs `prog` in lockstep until every node halts.
///
/// Rounds in which every live node sleeps and nothing is in flight are
/// skipped in one jump but still counted.
pub fn run_protocol<P: NodeProgram>(
    g: &Graph,
    ids: &IdAssignment,
    prog: &P,
    cfg: &ModelConfig,
    max_rounds: u64,
) -> Result<Outcome<P::Output>, SimError> {
    if max_rounds == 0 {
        return Err(SimError::Config("max_rounds must be at least 1".into()));
    }
    let n = g.n();
    assert_eq!(ids.len(), n, "identifier assignment does not match graph");
    let ctxs: Vec<NodeCtx> = (0..n).map(|v| NodeCtx { index: v, id: ids.id(v), degree: g.degree(v) }).collect();
    // reverse[u][p]: port of u at its p-th neighbor.
    let reverse: Vec<Vec<usize>> =
        (0..n).map(|u| g.neighbors(u).iter().map(|&v| g.port(v, u).expect("symmetric adjacency")).collect()).collect();
    let par = n >= PAR_THRESHOLD;
    let mut states: Vec<P::State> =
        if par { ctxs.par_iter().map(|c| prog.init(c)).collect() } else { ctxs.iter().map(|c| prog.init(c)).collect() };
    let mut status = vec![Status::Running; n];
    let mut metrics = RoundMetrics::new(cfg.mode);
    let label = "run";
    let mut round = 0u64;

    while status.iter().any(|&s| s != Status::Halted) {
        round += 1;
        if round > max_rounds {
            return Err(SimError::Timeout { max_rounds, metrics: Box::new(metrics) });
        }
        let send_one = |v: usize, st: &P::State| -> Vec<(usize, Bits)> {
            if awake(status[v], round) {
                prog.send(&ctxs[v], round, st)
            } else {
                Vec::new()
            }
        };
        let outboxes: Vec<Vec<(usize, Bits)>> = if par {
            states.par_iter().enumerate().map(|(v, st)| send_one(v, st)).collect()
        } else {
            states.iter().enumerate().map(|(v, st)| send_one(v, st)).collect()
        };

        let mut inboxes: Vec<Vec<(usize, Bits)>> = vec![Vec::new(); n];
        for (u, out) in outboxes.into_iter().enumerate() {
            for (port, msg) in out {
                let v = g.neighbors(u)[port];
                if let (Mode::Faithful, Some(limit)) = (cfg.mode, cfg.bandwidth) {
                    if msg.len() > limit as usize {
                        return Err(SimError::Bandwidth { round, from: u, to: v, bits: msg.len(), limit });
                    }
                }
                metrics.max_edge_bits = metrics.max_edge_bits.max(msg.len());
                metrics.messages += 1;
                if status[v] != Status::Halted {
                    inboxes[v].push((reverse[u][port], msg));
                }
            }
        }

        let recv_one = |v: usize, st: &mut P::State, s: &mut Status, inbox: &[(usize, Bits)]| {
            if awake(*s, round) || (*s != Status::Halted && !inbox.is_empty()) {
                *s = prog.receive(&ctxs[v], round, st, inbox);
            }
        };
        if par {
            states
                .par_iter_mut()
                .zip(status.par_iter_mut())
                .zip(inboxes.par_iter())
                .enumerate()
                .for_each(|(v, ((st, s), inbox))| recv_one(v, st, s, inbox));
        } else {
            for (v, ((st, s), inbox)) in states.iter_mut().zip(status.iter_mut()).zip(inboxes.iter()).enumerate() {
                recv_one(v, st, s, inbox);
            }
        }
        metrics.add_rounds(1, label);

        // Nothing is ever in flight between rounds, so if nobody is awake
        // next round we may jump to the earliest wake-up.
        let next_wake = status
            .iter()
            .filter_map(|&s| match s {
                Status::Running => Some(round + 1),
                Status::SleepUntil(w) => Some(w.max(round + 1)),
                Status::Halted => None,
            })
            .min();
        if let Some(w) = next_wake {
            if w > round + 1 {
                let skip = (w - 1).min(max_rounds) - round;
                metrics.add_rounds(skip, label);
                round += skip;
            }
        }
    }

    let outputs = states.into_iter().zip(ctxs.iter()).map(|(st, c)| prog.output(c, st)).collect();
    Ok(Outcome { outputs, metrics })
}
