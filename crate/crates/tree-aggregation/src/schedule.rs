//! The shared depth-staggered schedule and its message-passing realization.
//!
//! Upward operations: a node at depth `d` sends chunk `k` in round
//! `(r - d) + k`, having folded in its children's chunk `k` (sent one round
//! earlier). Downward: depth `d` sends chunk `k` in round `d + k`. Every tree
//! uses the same schedule, so a receiver can split a message that carries
//! chunks of several trees: chunks are concatenated in ascending tree order
//! and each has a width fixed by the schedule.

use std::collections::BTreeMap;

use congest_sim::{Bits, NodeCtx, NodeProgram, Status};
use graph_core::Graph;

use crate::{AggError, RootedTree};

/// Splits `total` bits into chunks of `width` bits (one chunk when unbounded).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Chunking {
    pub total: usize,
    pub width: Option<usize>,
}

impl Chunking {
    pub fn new(total: usize, per_tree: Option<u32>) -> Self {
        Chunking { total, width: per_tree.map(|w| w as usize) }
    }

    pub fn count(&self) -> u64 {
        match self.width {
            None => (self.total > 0) as u64,
            Some(w) => self.total.div_ceil(w) as u64,
        }
    }

    /// Bit offsets `[start, end)` of chunk `k` (1-based).
    pub fn bounds(&self, k: u64) -> (usize, usize) {
        match self.width {
            None => (0, self.total),
            Some(w) => {
                let start = (k as usize - 1) * w;
                (start, (start + w).min(self.total))
            }
        }
    }

    /// Width of chunk `k`, 0 outside `1..=count`.
    pub fn width_of(&self, k: i64) -> usize {
        if k < 1 || k as u64 > self.count() {
            return 0;
        }
        let (s, e) = self.bounds(k as u64);
        e - s
    }
}

/// Rounds of one pipelined pass: the last chunk reaches depth 0 (upward)
/// or depth `r` (downward) in round `r - 1 + K`.
pub(crate) fn pass_rounds(r: usize, chunks: u64) -> u64 {
    if r == 0 || chunks == 0 {
        0
    } else {
        r as u64 - 1 + chunks
    }
}

/// Per-(node, tree) logic of one operation.
pub(crate) trait Kernel: Sync {
    type Local: Send + Sync;
    type Out: Send + Sync;

    fn upward(&self) -> bool;
    fn init(&self, tree: usize, pos: usize, depth: usize, children: usize) -> Self::Local;
    /// Bits a member at `depth` sends in `round` (0 if silent).
    fn width(&self, depth: usize, round: u64) -> usize;
    /// Bits from child slot `c` (upward) or the parent (downward, `c = 0`).
    fn take(&self, depth: usize, round: u64, st: &mut Self::Local, c: usize, bits: Bits);
    /// Runs after every receipt of `round` (`round = 0` at start-up);
    /// returns what to send in `round + 1`.
    fn advance(&self, depth: usize, round: u64, st: &mut Self::Local) -> Option<Bits>;
    fn finish(&self, depth: usize, st: Self::Local) -> Self::Out;
}

pub(crate) struct Member {
    tree: usize,
    pos: usize,
    depth: usize,
    parent_port: Option<usize>,
    /// Ports of the children, ascending.
    child_ports: Vec<usize>,
}

/// Per node, its memberships ascending by tree index.
pub(crate) fn memberships(g: &Graph, trees: &[&RootedTree]) -> Result<Vec<Vec<Member>>, AggError> {
    let mut members: Vec<Vec<Member>> = (0..g.n()).map(|_| Vec::new()).collect();
    for (t, tree) in trees.iter().enumerate() {
        tree.check_embedding(g)?;
        let children = tree.children();
        for pos in 0..tree.len() {
            let v = tree.node_at(pos);
            let port = |u: usize| g.port(v, u).expect("embedding checked");
            members[v].push(Member {
                tree: t,
                pos,
                depth: tree.depth_at(pos),
                parent_port: tree.parent_pos(pos).map(|p| port(tree.node_at(p))),
                child_ports: children[pos].iter().map(|&c| port(tree.node_at(c))).collect(),
            });
        }
    }
    Ok(members)
}

pub(crate) struct TreeProgram<'a, K: Kernel> {
    pub kernel: &'a K,
    pub members: &'a [Vec<Member>],
    pub total_rounds: u64,
}

pub(crate) struct NodeState<L> {
    locals: Vec<L>,
    pending: Vec<Option<Bits>>,
}

impl<K: Kernel> NodeProgram for TreeProgram<'_, K> {
    type State = NodeState<K::Local>;
    type Output = Vec<(usize, usize, K::Out)>;

    fn init(&self, ctx: &NodeCtx) -> Self::State {
        let mine = &self.members[ctx.index];
        let mut locals: Vec<K::Local> =
            mine.iter().map(|m| self.kernel.init(m.tree, m.pos, m.depth, m.child_ports.len())).collect();
        let pending = mine.iter().zip(locals.iter_mut()).map(|(m, st)| self.kernel.advance(m.depth, 0, st)).collect();
        NodeState { locals, pending }
    }

    fn send(&self, ctx: &NodeCtx, round: u64, st: &Self::State) -> Vec<(usize, Bits)> {
        let mut out: BTreeMap<usize, Bits> = BTreeMap::new();
        for (m, msg) in self.members[ctx.index].iter().zip(&st.pending) {
            let Some(msg) = msg else { continue };
            debug_assert_eq!(msg.len(), self.kernel.width(m.depth, round));
            if self.kernel.upward() {
                let port = m.parent_port.expect("roots send nothing upward");
                out.entry(port).or_default().extend(msg);
            } else {
                for &port in &m.child_ports {
                    out.entry(port).or_default().extend(msg);
                }
            }
        }
        out.into_iter().filter(|(_, b)| !b.is_empty()).collect()
    }

    fn receive(&self, ctx: &NodeCtx, round: u64, st: &mut Self::State, inbox: &[(usize, Bits)]) -> Status {
        let mine = &self.members[ctx.index];
        for (port, msg) in inbox {
            let mut at = 0;
            for (m, local) in mine.iter().zip(st.locals.iter_mut()) {
                let (slot, sender_depth) = if self.kernel.upward() {
                    match m.child_ports.iter().position(|p| p == port) {
                        Some(c) => (c, m.depth + 1),
                        None => continue,
                    }
                } else if m.parent_port == Some(*port) {
                    (0, m.depth - 1)
                } else {
                    continue;
                };
                let w = self.kernel.width(sender_depth, round);
                if w > 0 {
                    self.kernel.take(m.depth, round, local, slot, msg.slice(at, at + w));
                    at += w;
                }
            }
            assert_eq!(at, msg.len(), "node {} could not split a {}-bit message", ctx.index, msg.len());
        }
        for ((m, local), pending) in mine.iter().zip(st.locals.iter_mut()).zip(st.pending.iter_mut()) {
            *pending = self.kernel.advance(m.depth, round, local);
        }
        if mine.is_empty() || round >= self.total_rounds {
            Status::Halted
        } else {
            Status::Running
        }
    }

    fn output(&self, ctx: &NodeCtx, st: Self::State) -> Self::Output {
        self.members[ctx.index]
            .iter()
            .zip(st.locals)
            .map(|(m, local)| (m.tree, m.pos, self.kernel.finish(m.depth, local)))
            .collect()
    }
}
