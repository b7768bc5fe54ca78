use graph_core::{ceil_log2, Graph, IdAssignment};
use tree_aggregation::RootedTree;

use crate::trace::record;
use crate::{id_mark, potential, BitSource, CarveError, CarveParams, CarveTrace, Mark};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rule {
    Fast(BitSource),
    /// Grow-blue/shrink-red carving; the phase-`i` split is id bit `i` or
    /// a balanced coloring of all clusters.
    Rg(BitSource),
}

/// Schedule and arithmetic of one carving variant.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rules {
    pub rule: Rule,
    pub b: u32,
    pub l: u32,
    pub phases: u32,
    pub steps: u32,
    pub accept_den: u128,
    pub kill_cost: u128,
}

impl Rules {
    pub fn fast(p: &CarveParams) -> Self {
        Rules {
            rule: Rule::Fast(p.bit_source),
            b: p.b,
            l: p.l,
            phases: p.phases,
            steps: p.steps_per_phase,
            accept_den: p.accept_denominator(),
            kill_cost: p.kill_cost(),
        }
    }

    /// `b` phases of `⌈2b·log2 n⌉ + 1` steps; accept iff `p·2b ≥ |C|`.
    pub fn rg(b: u32, n: usize, src: BitSource) -> Self {
        let steps = (2.0 * b as f64 * (n.max(1) as f64).log2()).ceil() as u32 + 1;
        Rules {
            rule: Rule::Rg(src),
            b,
            l: b + ceil_log2(n),
            phases: b,
            steps,
            accept_den: 2 * b as u128,
            kill_cost: 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.rule {
            Rule::Fast(src) => src.name(),
            Rule::Rg(BitSource::IdBits) => "rg",
            Rule::Rg(BitSource::BalancedColors) => "rg-balanced",
        }
    }

    pub fn source(&self) -> BitSource {
        match self.rule {
            Rule::Fast(src) => src,
            Rule::Rg(src) => src,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterState {
    /// Index of the seed node; names the cluster in traces.
    pub handle: usize,
    /// The seed node's identifier.
    pub cluster_id: u64,
    pub level: u32,
    /// For the baseline carving this is the member count.
    pub tokens: u128,
    /// Unordered while carving; ascending in a finished outcome.
    pub members: Vec<usize>,
    pub stalling: bool,
    pub finished: bool,
    /// No members left; frozen for the rest of the run.
    pub dissolved: bool,
    pub mark: Mark,
    /// Transcript-tree path, one branch per level increment.
    pub transcript: Vec<u32>,
    /// Members are exactly the terminals.
    pub steiner: RootedTree,
}

/// What a node knows about the cluster of one of its neighbors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct View {
    pub cluster_id: u64,
    pub level: u32,
    pub mark: Mark,
    pub stalling: bool,
}

/// Node `node` of cluster `from` asks to join `to` through its neighbor `contact`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Proposal {
    pub node: usize,
    pub from: usize,
    pub to: usize,
    pub contact: usize,
}

/// The decision of one active cluster in one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub cluster: usize,
    pub proposals: u64,
    pub accept: bool,
}

/// Picks the neighbor to propose to, as an index into `nbrs`
/// (`(contact id, view)` pairs). Order: lowest level, then mark `One`,
/// then smallest cluster id, then smallest contact id.
pub fn choose_target<I>(own: &View, nbrs: I) -> Option<usize>
where
    I: IntoIterator<Item = (u64, View)>,
{
    nbrs.into_iter()
        .enumerate()
        .filter(|(_, (_, w))| {
            w.cluster_id != own.cluster_id
                && !w.stalling
                && (w.level < own.level
                    || (w.level == own.level && own.mark == Mark::Zero && w.mark == Mark::One))
        })
        .min_by_key(|&(_, (contact, w))| (w.level, w.mark != Mark::One, w.cluster_id, contact))
        .map(|(i, _)| i)
}

/// Central state of one carving run. Cluster indices follow ascending
/// seed node, so index order and handle order agree.
pub struct CarveState<'g> {
    g: &'g Graph,
    ids: &'g IdAssignment,
    pub(crate) rules: Rules,
    phase: u32,
    step: u32,
    alive: Vec<bool>,
    cluster_of: Vec<usize>,
    /// Position of each node in its cluster's member list.
    slot: Vec<usize>,
    clusters: Vec<ClusterState>,
    changes: Vec<u32>,
    kills: usize,
    s_len: usize,
    tokens_created: u128,
    phase_start_tokens: Vec<u128>,
    fresh: Vec<bool>,
    stamp: Vec<u32>,
    stamp_gen: u32,
    /// Living nodes with at least one neighbor.
    talkers: usize,
    pub(crate) trace: CarveTrace,
}

impl<'g> CarveState<'g> {
    pub(crate) fn new(g: &'g Graph, ids: &'g IdAssignment, s: &[usize], rules: Rules) -> Result<Self, CarveError> {
        let n = g.n();
        if ids.len() != n {
            return Err(CarveError::Input(format!("{} identifiers for {n} nodes", ids.len())));
        }
        if s.is_empty() {
            return Err(CarveError::Input("S is empty".into()));
        }
        let mut alive = vec![false; n];
        for &v in s {
            if v >= n {
                return Err(CarveError::Input(format!("node {v} out of range for n = {n}")));
            }
            if std::mem::replace(&mut alive[v], true) {
                return Err(CarveError::Input(format!("node {v} listed twice in S")));
            }
        }
        let seeds: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let mut cluster_of = vec![NONE; n];
        let clusters: Vec<ClusterState> = seeds
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                cluster_of[v] = c;
                ClusterState {
                    handle: v,
                    cluster_id: ids.id(v),
                    level: 0,
                    tokens: 1,
                    members: vec![v],
                    stalling: false,
                    finished: false,
                    dissolved: false,
                    mark: Mark::Zero,
                    transcript: Vec::new(),
                    steiner: RootedTree::new(v, true),
                }
            })
            .collect();
        let mut trace = CarveTrace::default();
        record!(trace, "carve v1");
        record!(trace, "variant {}", rules.name());
        record!(
            trace,
            "params n={n} b={} L={} phases={} steps={} accept={} kill={}",
            rules.b,
            rules.l,
            rules.phases,
            rules.steps,
            rules.accept_den,
            rules.kill_cost
        );
        for &v in &seeds {
            record!(trace, "s {v} {}", ids.id(v));
        }
        for (u, v) in g.edges().filter(|&(u, v)| alive[u] && alive[v]) {
            record!(trace, "g {u} {v}");
        }
        let talkers = seeds.iter().filter(|&&v| g.degree(v) > 0).count();
        let k = clusters.len();
        Ok(CarveState {
            g,
            ids,
            rules,
            phase: 0,
            step: 0,
            alive,
            cluster_of,
            slot: vec![0; n],
            clusters,
            changes: vec![0; n],
            kills: 0,
            s_len: seeds.len(),
            tokens_created: seeds.len() as u128,
            phase_start_tokens: vec![1; k],
            fresh: vec![true; k],
            stamp: vec![0; n],
            stamp_gen: 0,
            talkers,
            trace,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn ids(&self) -> &'g IdAssignment {
        self.ids
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    pub(crate) fn set_step(&mut self, j: u32) {
        self.step = j;
    }

    /// Levels `0..=levels()`; the top level means finished.
    pub fn levels(&self) -> u32 {
        self.rules.b
    }

    pub fn clusters(&self) -> &[ClusterState] {
        &self.clusters
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    /// Cluster index of a living node.
    pub fn cluster_index(&self, v: usize) -> Option<usize> {
        (self.cluster_of[v] != NONE).then_some(self.cluster_of[v])
    }

    /// Whether the cluster's level changed at the end of the previous phase
    /// (every cluster counts as fresh in phase 1).
    pub fn is_fresh(&self, c: usize) -> bool {
        self.fresh[c]
    }

    /// Clusters that take a new balanced color at the next phase start, in
    /// index order: fresh unfinished clusters for the carving on levels,
    /// every live cluster for the baseline.
    pub fn color_targets(&self) -> Vec<usize> {
        (0..self.clusters.len())
            .filter(|&c| {
                let cl = &self.clusters[c];
                !cl.dissolved && self.fresh[c] && !cl.finished
            })
            .collect()
    }

    pub fn kills(&self) -> usize {
        self.kills
    }

    pub(crate) fn talkers(&self) -> usize {
        self.talkers
    }

    /// Growing this step: not stalling, finished or dissolved.
    pub fn is_active(&self, c: usize) -> bool {
        let cl = &self.clusters[c];
        !cl.stalling && !cl.finished && !cl.dissolved
    }

    pub fn active_clusters(&self) -> Vec<usize> {
        (0..self.clusters.len()).filter(|&c| self.is_active(c)).collect()
    }

    pub fn view(&self, c: usize) -> View {
        let cl = &self.clusters[c];
        View { cluster_id: cl.cluster_id, level: cl.level, mark: cl.mark, stalling: cl.stalling }
    }

    fn invariant(&self, what: String) -> CarveError {
        CarveError::Invariant { what, excerpt: self.trace.tail(12) }
    }

    /// Fixes the marks for phase `i`, checks the token invariant and logs
    /// every live cluster. `fresh_marks` pairs with the fresh, unfinished
    /// clusters in index order (balanced colors only).
    pub(crate) fn begin_phase(&mut self, i: u32, fresh_marks: Option<Vec<Mark>>) -> Result<(), CarveError> {
        self.phase = i;
        self.step = 0;
        let rules = self.rules;
        let mut supplied = fresh_marks.map(Vec::into_iter);
        for c in 0..self.clusters.len() {
            let fresh = self.fresh[c];
            let cl = &mut self.clusters[c];
            if cl.dissolved {
                continue;
            }
            cl.mark = match rules.rule {
                Rule::Rg(BitSource::IdBits) => id_mark(cl.cluster_id, i - 1, rules.b),
                Rule::Fast(BitSource::IdBits) => id_mark(cl.cluster_id, cl.level, rules.b),
                Rule::Fast(BitSource::BalancedColors) if cl.finished => Mark::Uncolored,
                Rule::Rg(BitSource::BalancedColors) | Rule::Fast(BitSource::BalancedColors) if fresh => {
                    let marks = supplied.as_mut().ok_or_else(|| CarveError::Coloring("no colors supplied".into()))?;
                    marks.next().ok_or_else(|| CarveError::Coloring(format!("no color for cluster {}", cl.handle)))?
                }
                Rule::Fast(BitSource::BalancedColors) | Rule::Rg(BitSource::BalancedColors) => cl.mark,
            };
        }
        if let Some(mut rest) = supplied {
            if rest.next().is_some() {
                return Err(CarveError::Coloring("more colors than fresh clusters".into()));
            }
        }
        record!(self.trace, "phase {i}");
        for c in 0..self.clusters.len() {
            let cl = &self.clusters[c];
            if cl.dissolved {
                continue;
            }
            let phi = match rules.rule {
                Rule::Rg(_) => 0,
                Rule::Fast(_) => potential(i, cl.level, cl.mark),
            };
            record!(
                self.trace,
                "pc {} {} {} {} {phi}",
                cl.handle,
                cl.level,
                cl.tokens,
                cl.mark.code(rules.source())
            );
            self.phase_start_tokens[c] = cl.tokens;
            if matches!(rules.rule, Rule::Fast(_)) && !cl.finished {
                let e = i as i64 - 2 * cl.level as i64 - 1;
                let ok = e < 0 || (e < 127 && cl.tokens >= 1u128 << e);
                if !ok {
                    let what = format!(
                        "token invariant: cluster {} has {} tokens at phase {i}, level {}",
                        cl.handle, cl.tokens, cl.level
                    );
                    return Err(self.invariant(what));
                }
            }
        }
        Ok(())
    }

    /// Proposals of every living node next to an active cluster, by node.
    pub fn propose_step(&mut self) -> Vec<Proposal> {
        self.stamp_gen += 1;
        let gen = self.stamp_gen;
        let mut cand = Vec::new();
        for c in 0..self.clusters.len() {
            if !self.is_active(c) {
                continue;
            }
            for &u in &self.clusters[c].members {
                for &w in self.g.neighbors(u) {
                    if self.alive[w] && self.cluster_of[w] != c && self.stamp[w] != gen {
                        self.stamp[w] = gen;
                        cand.push(w);
                    }
                }
            }
        }
        cand.sort_unstable();
        cand.into_iter().filter_map(|v| self.proposal_of(v)).collect()
    }

    fn proposal_of(&self, v: usize) -> Option<Proposal> {
        let from = self.cluster_of[v];
        let nbrs: Vec<usize> = self
            .g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.alive[w] && self.cluster_of[w] != from)
            .collect();
        let pick = choose_target(&self.view(from), nbrs.iter().map(|&w| (self.ids.id(w), self.view(self.cluster_of[w]))))?;
        let contact = nbrs[pick];
        Some(Proposal { node: v, from, to: self.cluster_of[contact], contact })
    }

    /// Accept iff `p · accept_den ≥ t`, where `t` is the token count (the
    /// member count for the baseline).
    pub fn decide(&self, c: usize, p: u64, size: u64) -> bool {
        let t = match self.rules.rule {
            Rule::Fast(_) => self.clusters[c].tokens,
            Rule::Rg(_) => size as u128,
        };
        p as u128 * self.rules.accept_den >= t
    }

    /// Tallies, decides and applies one step centrally.
    pub fn resolve_step(&mut self, proposals: &[Proposal]) -> Result<Vec<Verdict>, CarveError> {
        let mut counts = vec![0u64; self.clusters.len()];
        for pr in proposals {
            counts[pr.to] += 1;
        }
        let verdicts: Vec<Verdict> = self
            .active_clusters()
            .into_iter()
            .map(|c| {
                let size = self.clusters[c].members.len() as u64;
                Verdict { cluster: c, proposals: counts[c], accept: self.decide(c, counts[c], size) }
            })
            .collect();
        self.apply(proposals, &verdicts)?;
        Ok(verdicts)
    }

    fn leave(&mut self, v: usize) {
        let c = self.cluster_of[v];
        let cl = &mut self.clusters[c];
        let s = self.slot[v];
        cl.members.swap_remove(s);
        if let Some(&moved) = cl.members.get(s) {
            self.slot[moved] = s;
        }
        cl.steiner.set_terminal(v, false);
        if matches!(self.rules.rule, Rule::Rg(_)) {
            cl.tokens -= 1;
        }
        self.cluster_of[v] = NONE;
    }

    /// Applies verdicts (one per active cluster, ascending) to the proposals.
    pub(crate) fn apply(&mut self, proposals: &[Proposal], verdicts: &[Verdict]) -> Result<(), CarveError> {
        if verdicts.is_empty() && proposals.is_empty() {
            return Ok(());
        }
        let mut accept = vec![None; self.clusters.len()];
        for vd in verdicts {
            accept[vd.cluster] = Some(vd.accept);
        }
        record!(self.trace, "step {} {}", self.phase, self.step);
        for pr in proposals {
            record!(
                self.trace,
                "p {} {} {} {}",
                pr.node,
                self.clusters[pr.from].handle,
                self.clusters[pr.to].handle,
                pr.contact
            );
        }
        for pr in proposals {
            if accept[pr.to].is_none() {
                let what = format!("node {} proposed to inactive cluster {}", pr.node, self.clusters[pr.to].handle);
                return Err(self.invariant(what));
            }
            if self.cluster_of[pr.node] != pr.from || self.cluster_of[pr.contact] != pr.to {
                return Err(self.invariant(format!("stale proposal from node {}", pr.node)));
            }
        }
        let mut touched = Vec::new();
        for pr in proposals {
            let ok = accept[pr.to] == Some(true);
            touched.push(pr.from);
            self.leave(pr.node);
            let v = pr.node;
            if ok {
                if self.clusters[pr.to].steiner.contains(v) {
                    let what = format!("node {v} added twice to the tree of cluster {}", self.clusters[pr.to].handle);
                    return Err(self.invariant(what));
                }
                if let Err(e) = self.clusters[pr.to].steiner.add_child(v, pr.contact, true) {
                    return Err(self.invariant(e.to_string()));
                }
                let cl = &mut self.clusters[pr.to];
                self.slot[v] = cl.members.len();
                cl.members.push(v);
                if matches!(self.rules.rule, Rule::Rg(_)) {
                    cl.tokens += 1;
                }
                self.cluster_of[v] = pr.to;
                self.changes[v] += 1;
            } else {
                self.alive[v] = false;
                self.kills += 1;
                if self.g.degree(v) > 0 {
                    self.talkers -= 1;
                }
            }
        }
        for vd in verdicts {
            let c = vd.cluster;
            let p = vd.proposals as u128;
            let fast = matches!(self.rules.rule, Rule::Fast(_));
            let start = self.phase_start_tokens[c];
            let cl = &mut self.clusters[c];
            if vd.accept {
                if fast {
                    cl.tokens += p;
                    self.tokens_created += p;
                }
                record!(self.trace, "a {} {} {}", cl.handle, p, cl.tokens);
            } else {
                let cost = p * self.rules.kill_cost;
                if fast && (cost >= cl.tokens || 2 * (cl.tokens - cost) <= start) {
                    let what = format!("cluster {} cannot pay {cost} tokens out of {}", cl.handle, cl.tokens);
                    return Err(self.invariant(what));
                }
                cl.tokens -= cost;
                cl.stalling = true;
                record!(self.trace, "k {} {} {} {}", cl.handle, p, cost, cl.tokens);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for c in touched {
            let cl = &mut self.clusters[c];
            if cl.members.is_empty() && !cl.dissolved {
                cl.dissolved = true;
                cl.stalling = false;
                record!(self.trace, "d {}", cl.handle);
            }
        }
        Ok(())
    }

    /// Stalling clusters move one level up and take the transcript branch
    /// of their mark; reaching the top level finishes them.
    pub fn advance_phase(&mut self) -> Result<(), CarveError> {
        let rules = self.rules;
        let i = self.phase;
        for c in 0..self.clusters.len() {
            self.fresh[c] = matches!(rules.rule, Rule::Rg(_));
            let cl = &mut self.clusters[c];
            if cl.dissolved {
                continue;
            }
            if matches!(rules.rule, Rule::Fast(_)) && cl.stalling && !cl.finished {
                cl.level += 1;
                let branch = cl.mark.branch(i, rules.source());
                cl.transcript.push(branch);
                record!(self.trace, "lv {} {} {branch}", cl.handle, cl.level);
                self.fresh[c] = true;
                if cl.level == rules.b {
                    cl.finished = true;
                    record!(self.trace, "fin {}", cl.handle);
                }
            }
            cl.stalling = false;
        }
        Ok(())
    }

    /// Post-conditions of a completed run: every cluster finished (token
    /// variants) and no edge between two living clusters.
    pub(crate) fn check_final(&self) -> Result<(), CarveError> {
        if matches!(self.rules.rule, Rule::Fast(_)) {
            if let Some(cl) = self.clusters.iter().find(|cl| !cl.dissolved && !cl.finished) {
                let what = format!("cluster {} unfinished at level {} after the last phase", cl.handle, cl.level);
                return Err(self.invariant(what));
            }
        }
        for (u, v) in self.g.edges() {
            if self.alive[u] && self.alive[v] && self.cluster_of[u] != self.cluster_of[v] {
                let (a, b) = (self.clusters[self.cluster_of[u]].handle, self.clusters[self.cluster_of[v]].handle);
                return Err(self.invariant(format!("edge {u}-{v} joins clusters {a} and {b}")));
            }
        }
        Ok(())
    }

    pub(crate) fn finish(mut self) -> CarveOutcome {
        record!(self.trace, "end");
        let survivors: Vec<usize> = (0..self.g.n()).filter(|&v| self.alive[v]).collect();
        for &v in &survivors {
            record!(self.trace, "out {v} {}", self.clusters[self.cluster_of[v]].handle);
        }
        for cl in &self.clusters {
            for &v in cl.steiner.nodes() {
                let parent = cl.steiner.parent_of(v).map_or("-".to_string(), |p| p.to_string());
                record!(self.trace, "tree {} {v} {parent} {}", cl.handle, cl.steiner.is_terminal(v) as u8);
            }
        }
        let max_changes = self.changes.iter().copied().max().unwrap_or(0);
        record!(
            self.trace,
            "stat kills={} survivors={} tokens_created={} max_changes={max_changes}",
            self.kills,
            survivors.len(),
            self.tokens_created
        );
        let mut dissolved_trees = Vec::new();
        let mut clusters = Vec::new();
        for mut cl in self.clusters {
            if cl.dissolved {
                dissolved_trees.push(cl.steiner);
            } else {
                cl.members.sort_unstable();
                clusters.push(cl);
            }
        }
        CarveOutcome {
            s_len: self.s_len,
            survivors,
            clusters,
            dissolved_trees,
            kills: self.kills,
            tokens_created: self.tokens_created,
            max_changes,
            trace: self.trace,
        }
    }
}

/// Result of one carving run.
#[derive(Clone, Debug)]
pub struct CarveOutcome {
    pub s_len: usize,
    /// `S'`, ascending.
    pub survivors: Vec<usize>,
    /// Clusters that still have members, ascending by handle.
    pub clusters: Vec<ClusterState>,
    /// Trees of clusters that lost every member.
    pub dissolved_trees: Vec<RootedTree>,
    pub kills: usize,
    pub tokens_created: u128,
    pub max_changes: u32,
    pub trace: CarveTrace,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2_state<'g>(g: &'g Graph, ids: &'g IdAssignment, tokens: u128) -> (CarveState<'g>, Rules) {
        let params = CarveParams::new(1, 2, BitSource::IdBits);
        let rules = Rules::fast(&params);
        let mut st = CarveState::new(g, ids, &[0, 1], rules).unwrap();
        st.clusters[1].tokens = tokens;
        st.begin_phase(1, None).unwrap();
        st.set_step(1);
        (st, rules)
    }

    #[test]
    fn accept_boundary_and_kill_arithmetic() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let ids = IdAssignment::new(1, vec![0, 1]).unwrap();
        let l = 2u128;

        let (mut st, _) = k2_state(&g, &ids, 28 * l);
        let props = st.propose_step();
        assert_eq!(props, vec![Proposal { node: 0, from: 0, to: 1, contact: 1 }]);
        let v = st.resolve_step(&props).unwrap();
        assert!(v.iter().any(|v| v.cluster == 1 && v.accept));
        assert_eq!(st.clusters[1].tokens, 28 * l + 1);

        let (mut st, rules) = k2_state(&g, &ids, 28 * l + 1);
        let props = st.propose_step();
        st.resolve_step(&props).unwrap();
        let cl = &st.clusters[1];
        assert_eq!(cl.tokens, 14 * l + 1);
        assert!(2 * cl.tokens > 28 * l + 1);
        assert!(cl.stalling);
        assert_eq!(rules.kill_cost, 14 * l);
        assert!(!st.is_alive(0));
        assert_eq!(st.kills(), 1);
        // The emptied cluster of the killed node dissolves.
        assert!(st.clusters[0].dissolved);
    }

    #[test]
    fn advance_remaps_and_finishes() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let ids = IdAssignment::new(1, vec![0, 1]).unwrap();
        let (mut st, _) = k2_state(&g, &ids, 1);
        st.clusters[1].stalling = true;
        st.advance_phase().unwrap();
        let cl = &st.clusters[1];
        assert_eq!((cl.level, cl.transcript.clone(), cl.finished), (1, vec![3], true));
        // A non-stalling cluster keeps its level; its potential grows by 3.
        let c0 = &st.clusters[0];
        assert_eq!(c0.level, 0);
        assert_eq!(potential(2, c0.level, c0.mark) - potential(1, c0.level, c0.mark), 3);
    }
}
