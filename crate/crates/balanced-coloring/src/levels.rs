use std::collections::{BTreeMap, BTreeSet, HashMap};

use congest_sim::{ModelConfig, Session};
use graph_core::ceil_log2;
use tree_aggregation::{broadcast_rounds, plan_channels, RootedTree};

use crate::clusters::{balanced_color_clusters, ClusterScope};
use crate::net::{book, ClusterCosts};
use crate::{Color, ColorError};

/// `h·⌈log2 n⌉²` for the smallest integer `h` with
/// `h·⌈log2 n⌉² ≥ 200(⌈log2 n⌉ + b)²`.
pub fn bfs_radius(n: usize, b: u32) -> u64 {
    let l = ceil_log2(n).max(1) as u64;
    let need = 200 * (l + b as u64).pow(2);
    need.div_ceil(l * l) * l * l
}

/// Clusters with levels, of which `participants` are to be colored.
#[derive(Clone, Debug)]
pub struct LevelScope<'a> {
    /// Node → cluster, for nodes that still belong to one.
    pub node_cluster: &'a [Option<usize>],
    pub levels: &'a [u32],
    pub trees: Vec<&'a RootedTree>,
    pub ids: &'a [u64],
    pub id_bits: u32,
    pub participants: &'a [usize],
    pub radius: u64,
}

/// A participant grown by breadth-first search within the nodes of its
/// level or higher.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCluster {
    pub cluster: usize,
    pub level: u32,
    /// Members and captured nodes, ascending.
    pub region: Vec<usize>,
    /// Base Steiner tree plus the capture paths.
    pub tree: RootedTree,
    /// Largest capture distance.
    pub reach: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelColoring {
    /// Per participant, in the order given.
    pub colors: Vec<Color>,
    pub extended: Vec<ExtendedCluster>,
    /// Rounds of the slowest level, which is what all levels in parallel take.
    pub rounds: u64,
}

/// Grows the participants of level `d` and returns `(extended clusters,
/// node → index into them)`.
fn grow(g: &graph_core::Graph, node_ids: &[u64], scope: &LevelScope<'_>, part: &[usize], d: u32) -> Result<(Vec<ExtendedCluster>, Vec<Option<usize>>), ColorError> {
    let n = g.n();
    let in_domain = |v: usize| scope.node_cluster[v].is_some_and(|c| scope.levels[c] >= d);
    let mut region: Vec<Option<usize>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![0u64; n];
    let index: HashMap<usize, usize> = part.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut frontier = Vec::new();
    for v in 0..n {
        if let Some(c) = scope.node_cluster[v] {
            if let Some(&i) = index.get(&c) {
                region[v] = Some(i);
                frontier.push(v);
            }
        }
    }
    let mut captured = Vec::new();
    let mut t = 0;
    while !frontier.is_empty() && t < scope.radius {
        t += 1;
        let mut cand: HashMap<usize, (u64, u64, usize)> = HashMap::new();
        for &x in &frontier {
            let key = (scope.ids[part[region[x].unwrap()]], node_ids[x], x);
            for &y in g.neighbors(x) {
                if region[y].is_none() && in_domain(y) {
                    cand.entry(y).and_modify(|k| *k = (*k).min(key)).or_insert(key);
                }
            }
        }
        let mut next: Vec<usize> = cand.keys().copied().collect();
        next.sort_unstable();
        for &y in &next {
            let x = cand[&y].2;
            region[y] = region[x];
            parent[y] = x;
            dist[y] = t;
        }
        captured.extend(next.iter().copied());
        frontier = next;
    }
    let mut ext: Vec<ExtendedCluster> = part
        .iter()
        .map(|&c| ExtendedCluster { cluster: c, level: d, region: Vec::new(), tree: scope.trees[c].clone(), reach: 0 })
        .collect();
    for v in 0..n {
        if let Some(i) = region[v] {
            ext[i].region.push(v);
            ext[i].reach = ext[i].reach.max(dist[v]);
        }
    }
    for &y in &captured {
        let tree = &mut ext[region[y].unwrap()].tree;
        if tree.contains(y) {
            tree.set_terminal(y, true);
        } else {
            tree.add_child(y, parent[y], true)?;
        }
    }
    Ok((ext, region))
}

/// Colors each participant red, blue or not at all. Every level is handled
/// independently on its own share of the bandwidth: participants of level
/// `d` grow regions inside the nodes of level `d` or higher, and the region
/// graph is colored per component; participants without a region neighbor
/// stay uncolored.
pub fn partial_color_levels(sess: &mut Session<'_>, scope: &LevelScope<'_>) -> Result<LevelColoring, ColorError> {
    let g = sess.graph();
    let node_ids = sess.ids().ids();
    let n = g.n();
    if scope.node_cluster.len() != n {
        return Err(ColorError::Input(format!("cluster map has {} entries for {n} nodes", scope.node_cluster.len())));
    }
    let mut by_level: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &c in scope.participants {
        by_level.entry(scope.levels[c]).or_default().push(c);
    }
    let share = match sess.bandwidth() {
        None => None,
        Some(b) if (b as usize) < by_level.len().max(1) => {
            return Err(ColorError::Input(format!("bandwidth {b} cannot carry {} levels in parallel", by_level.len())))
        }
        Some(b) => Some(b / by_level.len().max(1) as u32),
    };
    let sub_cfg = ModelConfig { bandwidth: share, mode: sess.mode() };

    let mut colors: BTreeMap<usize, Color> = BTreeMap::new();
    let mut extended: BTreeMap<usize, ExtendedCluster> = BTreeMap::new();
    let mut slowest = 0;
    for (&d, part) in &by_level {
        let (ext, region) = grow(g, node_ids, scope, part, d)?;
        let mut sub = Session::new(g, sess.ids(), sub_cfg);
        let trees: Vec<&RootedTree> = ext.iter().map(|e| &e.tree).collect();
        let plan = plan_channels(&trees, share)?;
        let r = trees.iter().map(|t| t.depth()).max().unwrap_or(0);
        let costs = ClusterCosts { r, per_tree: plan.per_tree, bandwidth: share };
        let w = scope.id_bits as usize;
        // Regions learn their cluster id, then whether any region borders another.
        let setup = broadcast_rounds(r, scope.id_bits, plan.per_tree) + costs.exchange(w) + costs.min(1) + costs.broadcast(1);
        book(&mut sub, setup, "color.region")?;

        let full = ClusterScope { owner: region, trees, ids: part.iter().map(|&c| scope.ids[c]).collect(), id_bits: scope.id_bits };
        let adj = full.cluster_graph(g);
        let active: Vec<usize> = (0..part.len()).filter(|&i| !adj[i].is_empty()).collect();
        if !active.is_empty() {
            let mut index = vec![usize::MAX; part.len()];
            for (j, &i) in active.iter().enumerate() {
                index[i] = j;
            }
            let owner = full.owner.iter().map(|o| o.map(|i| index[i]).filter(|&j| j != usize::MAX)).collect();
            let inner = ClusterScope {
                owner,
                trees: active.iter().map(|&i| full.trees[i]).collect(),
                ids: active.iter().map(|&i| full.ids[i]).collect(),
                id_bits: scope.id_bits,
            };
            let out = balanced_color_clusters(&mut sub, &inner)?;
            for (j, &i) in active.iter().enumerate() {
                colors.insert(part[i], out.coloring.colors[j]);
            }
        }
        slowest = slowest.max(sub.metrics().rounds_total);
        for e in ext {
            extended.insert(e.cluster, e);
        }
    }
    // The capture search runs its full radius whether or not anything is left to capture.
    let rounds = scope.radius + slowest;
    book(sess, rounds, "color.levels")?;
    let distinct: BTreeSet<usize> = scope.participants.iter().copied().collect();
    if distinct.len() != scope.participants.len() {
        return Err(ColorError::Input("participant listed twice".into()));
    }
    Ok(LevelColoring {
        colors: scope.participants.iter().map(|c| colors.get(c).copied().unwrap_or(Color::Uncolored)).collect(),
        extended: scope.participants.iter().map(|c| extended.remove(c).unwrap()).collect(),
        rounds,
    })
}
