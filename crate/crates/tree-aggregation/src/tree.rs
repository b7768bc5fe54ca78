use std::collections::HashMap;

use graph_core::Graph;

use crate::AggError;

/// A rooted tree embedded in a host graph.
///
/// Nodes are stored in insertion order, so every parent precedes its
/// children; position 0 is the root. Trees only grow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    nodes: Vec<usize>,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    terminal: Vec<bool>,
    index: HashMap<usize, usize>,
    max_depth: usize,
}

impl RootedTree {
    pub fn new(root: usize, terminal: bool) -> Self {
        RootedTree {
            nodes: vec![root],
            parent: vec![None],
            depth: vec![0],
            terminal: vec![terminal],
            index: HashMap::from([(root, 0)]),
            max_depth: 0,
        }
    }

    /// Attaches `node` below `parent` (a graph node already in the tree).
    pub fn add_child(&mut self, node: usize, parent: usize, terminal: bool) -> Result<usize, AggError> {
        if self.index.contains_key(&node) {
            return Err(AggError::Tree(format!("node {node} already in tree rooted at {}", self.root())));
        }
        let pp = *self
            .index
            .get(&parent)
            .ok_or_else(|| AggError::Tree(format!("parent {parent} not in tree rooted at {}", self.root())))?;
        let pos = self.nodes.len();
        let d = self.depth[pp] + 1;
        self.nodes.push(node);
        self.parent.push(Some(pp));
        self.depth.push(d);
        self.terminal.push(terminal);
        self.index.insert(node, pos);
        self.max_depth = self.max_depth.max(d);
        Ok(pos)
    }

    pub fn set_terminal(&mut self, node: usize, terminal: bool) {
        let pos = self.index[&node];
        self.terminal[pos] = terminal;
    }

    pub fn root(&self) -> usize {
        self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Depth bound `r`: the largest node depth.
    pub fn depth(&self) -> usize {
        self.max_depth
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, node: usize) -> bool {
        self.index.contains_key(&node)
    }

    pub fn position(&self, node: usize) -> Option<usize> {
        self.index.get(&node).copied()
    }

    pub fn node_at(&self, pos: usize) -> usize {
        self.nodes[pos]
    }

    /// Parent position of the node at `pos`.
    pub fn parent_pos(&self, pos: usize) -> Option<usize> {
        self.parent[pos]
    }

    pub fn parent_of(&self, node: usize) -> Option<usize> {
        self.parent[self.index[&node]].map(|p| self.nodes[p])
    }

    pub fn depth_at(&self, pos: usize) -> usize {
        self.depth[pos]
    }

    pub fn depth_of(&self, node: usize) -> Option<usize> {
        self.position(node).map(|p| self.depth[p])
    }

    pub fn is_terminal(&self, node: usize) -> bool {
        self.position(node).is_some_and(|p| self.terminal[p])
    }

    pub fn terminal_at(&self, pos: usize) -> bool {
        self.terminal[pos]
    }

    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().zip(&self.terminal).filter(|(_, &t)| t).map(|(&v, _)| v)
    }

    /// `(node, parent)` pairs for every non-root node.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes.iter().zip(&self.parent).filter_map(|(&v, p)| p.map(|p| (v, self.nodes[p])))
    }

    /// Child positions of every position, ascending by child node index.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (pos, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(pos);
            }
        }
        for list in &mut ch {
            list.sort_by_key(|&c| self.nodes[c]);
        }
        ch
    }

    /// Every tree edge must be a graph edge.
    pub fn check_embedding(&self, g: &Graph) -> Result<(), AggError> {
        for (v, p) in self.edges() {
            if !g.has_edge(v, p) {
                return Err(AggError::Tree(format!("tree edge {p}-{v} is not a graph edge")));
            }
        }
        Ok(())
    }
}
