use congest_sim::Session;
use tree_aggregation::{plan_channels, RootedTree};

use crate::house::{attach, split, square, OutEdgeChoice};
use crate::mis::linial_mis;
use crate::net::{book, ClusterCosts, ClusterNet};
use crate::{balance_cap, Color, ColorError, RBColoring};

/// Node-disjoint clusters to be colored. Each cluster's tree spans the
/// nodes it owns.
#[derive(Clone, Debug)]
pub struct ClusterScope<'a> {
    /// Node → owning cluster.
    pub owner: Vec<Option<usize>>,
    pub trees: Vec<&'a RootedTree>,
    pub ids: Vec<u64>,
    pub id_bits: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterColoring {
    pub coloring: RBColoring,
    pub choice: OutEdgeChoice,
    /// Cluster → component of the cluster graph.
    pub component: Vec<usize>,
    pub rounds: u64,
}

impl ClusterScope<'_> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Adjacency of the cluster graph, ascending.
    pub fn cluster_graph(&self, g: &graph_core::Graph) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (u, v) in g.edges() {
            if let (Some(a), Some(b)) = (self.owner[u], self.owner[v]) {
                if a != b {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    fn validate(&self, n: usize) -> Result<(), ColorError> {
        if self.owner.len() != n {
            return Err(ColorError::Input(format!("owner map has {} entries for {n} nodes", self.owner.len())));
        }
        if self.trees.len() != self.len() {
            return Err(ColorError::Input(format!("{} trees for {} clusters", self.trees.len(), self.len())));
        }
        for (v, o) in self.owner.iter().enumerate() {
            if let Some(c) = *o {
                if c >= self.len() || !self.trees[c].contains(v) {
                    return Err(ColorError::Input(format!("node {v} is owned by cluster {c} but not in its tree")));
                }
            }
        }
        let mut sorted = self.ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ColorError::Input("cluster identifiers repeat".into()));
        }
        Ok(())
    }
}

fn components(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; adj.len()];
    let mut next = 0;
    for s in 0..adj.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if comp[u] == usize::MAX {
                    comp[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Colors every cluster red or blue so that each component of the cluster
/// graph has at most `⌊3k/4⌋` clusters of either color. Decisions are
/// computed from the cluster graph; rounds are booked as the composition of
/// tree aggregations and edge exchanges that would carry them.
pub fn balanced_color_clusters(sess: &mut Session<'_>, scope: &ClusterScope<'_>) -> Result<ClusterColoring, ColorError> {
    let g = sess.graph();
    let node_ids = sess.ids().ids();
    scope.validate(g.n())?;
    let k = scope.len();
    let ids = &scope.ids;
    let start = sess.metrics().rounds_total;

    // Minimum proposal (neighbor cluster id, own endpoint id, far endpoint id).
    let mut best: Vec<Option<(u64, u64, u64, usize, usize)>> = vec![None; k];
    for (w, o) in scope.owner.iter().enumerate() {
        let Some(a) = *o else { continue };
        for &x in g.neighbors(w) {
            if let Some(b) = scope.owner[x].filter(|&b| b != a) {
                let cand = (ids[b], node_ids[w], node_ids[x], w, x);
                if best[a].map_or(true, |cur| cand < cur) {
                    best[a] = Some(cand);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(k);
    let mut embodiment = Vec::with_capacity(k);
    for (a, p) in best.iter().enumerate() {
        let Some((_, _, _, _, x)) = *p else {
            return Err(ColorError::Precondition(format!("cluster {a} has no neighboring cluster")));
        };
        out.push(scope.owner[x].unwrap());
        embodiment.push(x);
    }
    let choice = OutEdgeChoice::new(out);

    let plan = plan_channels(&scope.trees, sess.bandwidth())?;
    let costs = ClusterCosts {
        r: scope.trees.iter().map(|t| t.depth()).max().unwrap_or(0),
        per_tree: plan.per_tree,
        bandwidth: sess.bandwidth(),
    };
    let w = scope.id_bits as usize;
    let setup = costs.exchange(w) + 2 * (costs.min(w + 1) + costs.broadcast(w)) + costs.exchange(1);
    let heavy = costs.convergecast(w, 11) + costs.broadcast(1) + costs.exchange(1) + costs.convergecast(w, 11);
    book(sess, setup + heavy, "color.point")?;

    let light = choice.light_graph();
    let members: Vec<usize> = (0..k).filter(|&c| !light[c].is_empty()).collect();
    let mut entity = vec![usize::MAX; k];
    for (e, &c) in members.iter().enumerate() {
        entity[c] = e;
    }
    let adj: Vec<Vec<usize>> = members.iter().map(|&c| light[c].iter().map(|&u| entity[u]).collect()).collect();
    let eids: Vec<u64> = members.iter().map(|&c| ids[c]).collect();
    let mis = linial_mis(sess, &square(&adj), &eids, scope.id_bits, &mut ClusterNet { costs })?;
    let at = attach(&adj, &mis.in_set, &eids);
    let grouping = 3 * costs.hop(w) + costs.relay(w) + costs.hop(121) + costs.hop(11);
    book(sess, grouping, "color.group")?;

    let mut colors = vec![Color::Uncolored; k];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (e, a) in at.iter().enumerate() {
        groups[members[a.center]].push(members[e]);
    }
    for group in groups.iter_mut().filter(|g| !g.is_empty()) {
        split(group, ids, &mut colors);
    }

    // Heavy stars: tokens at the entry points of isolated light in-neighbors
    // and one at the root, paired bottom-up along the Steiner tree.
    let mut tokens: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
    for a in (0..k).filter(|&a| !choice.heavy[a] && light[a].is_empty()) {
        let c = choice.out[a];
        debug_assert!(choice.heavy[c]);
        let pos = scope.trees[c].position(embodiment[a]).expect("entry point lies in the tree");
        tokens[c].push((pos, a));
    }
    for c in (0..k).filter(|&c| choice.heavy[c]) {
        pair_tokens(scope.trees[c], c, &tokens[c], ids, &mut colors);
    }
    let stars = costs.broadcast(1) + costs.exchange(w) + 2 * costs.broadcast(w + 1) + costs.exchange(1) + costs.convergecast(1, 1);
    book(sess, stars, "color.pair")?;

    let component = components(&scope.cluster_graph(g));
    check_components(&colors, &component)?;
    Ok(ClusterColoring { coloring: RBColoring { colors }, choice, component, rounds: sess.metrics().rounds_total - start })
}

/// Pairs tokens bottom-up: at each tree node the tokens present, ascending
/// by cluster id, are paired off blue/red and an odd one is passed up; the
/// root's leftover is blue.
fn pair_tokens(tree: &RootedTree, root_cluster: usize, placed: &[(usize, usize)], ids: &[u64], colors: &mut [Color]) {
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    at[0].push(root_cluster);
    for &(pos, a) in placed {
        at[pos].push(a);
    }
    for pos in (0..tree.len()).rev() {
        let mut here = std::mem::take(&mut at[pos]);
        here.sort_by_key(|&c| ids[c]);
        for pair in here.chunks(2) {
            match pair {
                [x, y] => {
                    colors[*x] = Color::Blue;
                    colors[*y] = Color::Red;
                }
                [x] => match tree.parent_pos(pos) {
                    Some(p) => at[p].push(*x),
                    None => colors[*x] = Color::Blue,
                },
                _ => unreachable!(),
            }
        }
    }
}

fn check_components(colors: &[Color], component: &[usize]) -> Result<(), ColorError> {
    let comps = component.iter().max().map_or(0, |&c| c + 1);
    let mut tally = vec![(0usize, 0usize, 0usize); comps];
    for (c, &col) in colors.iter().enumerate() {
        let t = &mut tally[component[c]];
        t.0 += 1;
        match col {
            Color::Red => t.1 += 1,
            Color::Blue => t.2 += 1,
            Color::Uncolored => {}
        }
    }
    for (i, &(k, red, blue)) in tally.iter().enumerate() {
        if red + blue != k || red.max(blue) > balance_cap(k) {
            return Err(ColorError::Balance(format!("component {i}: {red} red, {blue} blue of {k}")));
        }
    }
    Ok(())
}
