//! Balanced colors for the identifier-independent carvings.

use ball_carving::{CarveError, CarveState, ColorOracle, Mark};
use balanced_coloring::{balanced_color_clusters, book, partial_color_levels, ClusterCosts, ClusterScope, Color, ColorError, LevelScope};
use congest_sim::Session;
use tree_aggregation::{plan_channels, RootedTree};

fn mark(c: Color) -> Mark {
    match c {
        Color::Red => Mark::Zero,
        Color::Blue => Mark::One,
        Color::Uncolored => Mark::Uncolored,
    }
}

fn lift(e: ColorError) -> CarveError {
    match e {
        ColorError::Agg(a) => CarveError::Agg(a),
        ColorError::Sim(s) => CarveError::Sim(s),
        other => CarveError::Coloring(other.to_string()),
    }
}

fn node_clusters(state: &CarveState<'_>) -> Vec<Option<usize>> {
    (0..state.graph().n()).map(|v| state.cluster_index(v)).collect()
}

/// Colors every live cluster with the cluster lemma; clusters without a
/// neighboring cluster stay uncolored.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClusterGraphOracle;

impl ColorOracle for ClusterGraphOracle {
    fn colors(&mut self, sess: &mut Session<'_>, state: &CarveState<'_>, targets: &[usize]) -> Result<Vec<Mark>, CarveError> {
        let clusters = state.clusters();
        let mut index = vec![usize::MAX; clusters.len()];
        for (i, &c) in targets.iter().enumerate() {
            index[c] = i;
        }
        let owner: Vec<Option<usize>> =
            node_clusters(state).into_iter().map(|o| o.map(|c| index[c]).filter(|&i| i != usize::MAX)).collect();
        let trees: Vec<&RootedTree> = targets.iter().map(|&c| &clusters[c].steiner).collect();
        let ids: Vec<u64> = targets.iter().map(|&c| clusters[c].cluster_id).collect();
        let id_bits = state.ids().b();
        let full = ClusterScope { owner, trees, ids, id_bits };

        // Neighbor-cluster ids cross every edge; roots learn whether any exists.
        let plan = plan_channels(&full.trees, sess.bandwidth())?;
        let costs = ClusterCosts {
            r: full.trees.iter().map(|t| t.depth()).max().unwrap_or(0),
            per_tree: plan.per_tree,
            bandwidth: sess.bandwidth(),
        };
        book(sess, costs.exchange(id_bits as usize) + costs.min(1) + costs.broadcast(1), "color.adjacent").map_err(lift)?;

        let adj = full.cluster_graph(state.graph());
        let active: Vec<usize> = (0..targets.len()).filter(|&i| !adj[i].is_empty()).collect();
        let mut marks = vec![Mark::Uncolored; targets.len()];
        if active.is_empty() {
            return Ok(marks);
        }
        let mut sub = vec![usize::MAX; targets.len()];
        for (j, &i) in active.iter().enumerate() {
            sub[i] = j;
        }
        let scope = ClusterScope {
            owner: full.owner.iter().map(|o| o.map(|i| sub[i]).filter(|&j| j != usize::MAX)).collect(),
            trees: active.iter().map(|&i| full.trees[i]).collect(),
            ids: active.iter().map(|&i| full.ids[i]).collect(),
            id_bits,
        };
        let out = balanced_color_clusters(sess, &scope).map_err(lift)?;
        for (j, &i) in active.iter().enumerate() {
            marks[i] = mark(out.coloring.colors[j]);
        }
        Ok(marks)
    }
}

/// Colors clusters that just reached a new level, per level, by growing
/// them within `radius` inside the nodes of their level or higher.
#[derive(Clone, Copy, Debug)]
pub struct LevelOracle {
    pub radius: u64,
}

impl ColorOracle for LevelOracle {
    fn colors(&mut self, sess: &mut Session<'_>, state: &CarveState<'_>, targets: &[usize]) -> Result<Vec<Mark>, CarveError> {
        let clusters = state.clusters();
        let node_cluster = node_clusters(state);
        let levels: Vec<u32> = clusters.iter().map(|c| c.level).collect();
        let ids: Vec<u64> = clusters.iter().map(|c| c.cluster_id).collect();
        let scope = LevelScope {
            node_cluster: &node_cluster,
            levels: &levels,
            trees: clusters.iter().map(|c| &c.steiner).collect(),
            ids: &ids,
            id_bits: state.ids().b(),
            participants: targets,
            radius: self.radius,
        };
        let out = partial_color_levels(sess, &scope).map_err(lift)?;
        Ok(out.colors.into_iter().map(mark).collect())
    }
}
