use std::collections::HashMap;

use crate::{AggError, RootedTree};

/// Bandwidth split among trees sharing edges: each tree gets `⌊B/P⌋` bits
/// per edge per round, `P` being the largest number of trees on one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelPlan {
    pub bandwidth: Option<u32>,
    /// Max trees on any edge (0 when no tree has an edge).
    pub p: usize,
    /// `b'`; `None` under unbounded bandwidth.
    pub per_tree: Option<u32>,
    pub trees: usize,
    /// Undirected edge `(min, max)` → indices of the trees using it.
    pub edge_trees: HashMap<(usize, usize), Vec<usize>>,
}

pub fn plan_channels(trees: &[&RootedTree], bandwidth: Option<u32>) -> Result<ChannelPlan, AggError> {
    let mut edge_trees: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tree) in trees.iter().enumerate() {
        for (v, p) in tree.edges() {
            edge_trees.entry((v.min(p), v.max(p))).or_default().push(t);
        }
    }
    let p = edge_trees.values().map(Vec::len).max().unwrap_or(0);
    let per_tree = match bandwidth {
        None => None,
        Some(b) if p == 0 => Some(b),
        Some(b) => {
            if p as u64 > b as u64 {
                return Err(AggError::Overlap { p, bandwidth: b });
            }
            Some(b / p as u32)
        }
    };
    Ok(ChannelPlan { bandwidth, p, per_tree, trees: trees.len(), edge_trees })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `count` copies of the path 0-1-2 rooted at 0.
    fn stacked(count: usize) -> Vec<RootedTree> {
        (0..count)
            .map(|_| {
                let mut t = RootedTree::new(0, true);
                t.add_child(1, 0, true).unwrap();
                t.add_child(2, 1, true).unwrap();
                t
            })
            .collect()
    }

    #[test]
    fn budget_examples() {
        let trees = stacked(8);
        let refs: Vec<&RootedTree> = trees.iter().collect();
        assert_eq!(plan_channels(&refs, Some(32)).unwrap().per_tree, Some(4));
        assert_eq!(plan_channels(&refs, Some(8)).unwrap().per_tree, Some(1));
        assert!(matches!(plan_channels(&refs, Some(4)), Err(AggError::Overlap { p: 8, bandwidth: 4 })));
        assert_eq!(plan_channels(&refs, None).unwrap().per_tree, None);
        let single = RootedTree::new(3, true);
        assert_eq!(plan_channels(&[&single], Some(5)).unwrap().per_tree, Some(5));
    }
}
