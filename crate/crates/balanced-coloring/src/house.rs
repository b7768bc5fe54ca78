//! Structure shared by the node and cluster lemmas: every entity points at
//! one neighbor, entities with in-degree at least 10 are heavy, and the
//! light ones with a light neighbor in that pointer graph form `H'`.

use crate::Color;

pub const HEAVY_IN_DEGREE: usize = 10;

/// One outgoing pointer per entity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutEdgeChoice {
    pub out: Vec<usize>,
    pub in_degree: Vec<usize>,
    pub heavy: Vec<bool>,
}

impl OutEdgeChoice {
    pub fn new(out: Vec<usize>) -> Self {
        let mut in_degree = vec![0; out.len()];
        for &t in &out {
            in_degree[t] += 1;
        }
        let heavy = in_degree.iter().map(|&d| d >= HEAVY_IN_DEGREE).collect();
        OutEdgeChoice { out, in_degree, heavy }
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    /// Adjacency of `H'`: pointer edges with both ends light, undirected
    /// and deduplicated, ascending.
    pub fn light_graph(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (v, &t) in self.out.iter().enumerate() {
            if !self.heavy[v] && !self.heavy[t] {
                adj[v].push(t);
                adj[t].push(v);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Entities within distance two, excluding the entity itself.
pub fn square(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..adj.len())
        .map(|v| {
            let mut near: Vec<usize> = adj[v]
                .iter()
                .flat_map(|&u| std::iter::once(u).chain(adj[u].iter().copied()))
                .filter(|&u| u != v)
                .collect();
            near.sort_unstable();
            near.dedup();
            near
        })
        .collect()
}

/// Attachment of an `H'` entity to its cluster center.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Attach {
    pub center: usize,
    /// `None` for centers.
    pub parent: Option<usize>,
    pub dist: u8,
}

/// Nearest center in `mis`, ties by smallest center id, then smallest id of
/// the neighbor that relayed it.
pub fn attach(adj: &[Vec<usize>], mis: &[bool], ids: &[u64]) -> Vec<Attach> {
    let n = adj.len();
    let mut at: Vec<Option<Attach>> = (0..n).map(|v| mis[v].then_some(Attach { center: v, parent: None, dist: 0 })).collect();
    for v in (0..n).filter(|&v| !mis[v]) {
        if let Some(&c) = adj[v].iter().filter(|&&u| mis[u]).min_by_key(|&&u| ids[u]) {
            at[v] = Some(Attach { center: c, parent: Some(c), dist: 1 });
        }
    }
    let first = at.clone();
    for v in (0..n).filter(|&v| first[v].is_none()) {
        let best = adj[v]
            .iter()
            .filter_map(|&u| first[u].map(|a| (ids[a.center], ids[u], a.center, u)))
            .min()
            .expect("a maximal independent set of the square dominates within two hops");
        at[v] = Some(Attach { center: best.2, parent: Some(best.3), dist: 2 });
    }
    at.into_iter().map(Option::unwrap).collect()
}

/// Blue for the first `⌈k/2⌉` of `members` by ascending id, red for the rest.
pub fn split(members: &mut [usize], ids: &[u64], colors: &mut [Color]) {
    members.sort_by_key(|&v| ids[v]);
    let blue = members.len().div_ceil(2);
    for (i, &v) in members.iter().enumerate() {
        colors[v] = if i < blue { Color::Blue } else { Color::Red };
    }
}
