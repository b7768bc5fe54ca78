//! Transports that realize virtual rounds on the session's network.

use std::collections::{HashMap, HashSet};

use congest_sim::{exchange_rounds, Bits, Outbox, Session};
use tree_aggregation::{broadcast_rounds, convergecast_rounds, min_rounds};

use crate::mis::VirtualNet;
use crate::ColorError;

/// The virtual graph is the network itself.
pub struct DirectNet;

impl VirtualNet for DirectNet {
    fn announce(&mut self, sess: &mut Session<'_>, senders: &[(usize, u64)], width: u32) -> Result<(), ColorError> {
        let g = sess.graph();
        if sess.is_faithful() {
            let mut out: Outbox = vec![Vec::new(); g.n()];
            for &(v, x) in senders {
                out[v] = (0..g.degree(v)).map(|p| (p, Bits::from_uint(x, width))).collect();
            }
            sess.exchange("mis.announce", out)?;
        } else {
            let traffic = senders.iter().any(|&(v, _)| g.degree(v) > 0).then_some(width as usize);
            sess.charge(exchange_rounds(traffic, sess.bandwidth()), "mis.announce")?;
        }
        Ok(())
    }
}

/// `(H')²` over a node subgraph `H'`: a value travels one hop, then every
/// node that heard something relays the list it heard.
pub struct SquareNet {
    /// Entity → network node.
    pub nodes: Vec<usize>,
    /// `H'` adjacency between entities.
    pub adj: Vec<Vec<usize>>,
}

impl SquareNet {
    fn port(&self, sess: &Session<'_>, a: usize, b: usize) -> usize {
        sess.graph().port(self.nodes[a], self.nodes[b]).expect("H' edges are network edges")
    }
}

impl VirtualNet for SquareNet {
    fn announce(&mut self, sess: &mut Session<'_>, senders: &[(usize, u64)], width: u32) -> Result<(), ColorError> {
        let n = sess.graph().n();
        let mut heard: Vec<Vec<u64>> = vec![Vec::new(); self.nodes.len()];
        for &(v, x) in senders {
            for &u in &self.adj[v] {
                heard[u].push(x);
            }
        }
        if !sess.is_faithful() {
            let hop1 = senders.iter().any(|&(v, _)| !self.adj[v].is_empty()).then_some(width as usize);
            let hop2 = (0..self.nodes.len())
                .filter(|&u| !heard[u].is_empty() && !self.adj[u].is_empty())
                .map(|u| heard[u].len() * width as usize)
                .max();
            let bw = sess.bandwidth();
            sess.charge(exchange_rounds(hop1, bw), "mis.hop")?;
            sess.charge(exchange_rounds(hop2, bw), "mis.relay")?;
            return Ok(());
        }
        let mut out: Outbox = vec![Vec::new(); n];
        for &(v, x) in senders {
            for &u in &self.adj[v] {
                out[self.nodes[v]].push((self.port(sess, v, u), Bits::from_uint(x, width)));
            }
        }
        let inbox = sess.exchange("mis.hop", sort(out))?;
        let mut got: Vec<Vec<u64>> = vec![Vec::new(); self.nodes.len()];
        for (e, &v) in self.nodes.iter().enumerate() {
            got[e] = inbox[v].iter().map(|(_, m)| m.reader().uint(width)).collect();
        }
        let mut out: Outbox = vec![Vec::new(); n];
        for u in 0..self.nodes.len() {
            if got[u].is_empty() {
                continue;
            }
            let mut list = Bits::new();
            for &x in &got[u] {
                list.push_uint(x, width);
            }
            for &w in &self.adj[u] {
                out[self.nodes[u]].push((self.port(sess, u, w), list.clone()));
            }
        }
        let inbox = sess.exchange("mis.relay", sort(out))?;
        // Every sender's value must have reached its whole two-hop neighborhood.
        let value: HashMap<usize, u64> = senders.iter().copied().collect();
        for (e, &v) in self.nodes.iter().enumerate() {
            let mut known: HashSet<u64> = got[e].iter().copied().collect();
            for (_, m) in &inbox[v] {
                let mut r = m.reader();
                while r.remaining() >= width as usize {
                    known.insert(r.uint(width));
                }
            }
            let near = self.adj[e].iter().flat_map(|&u| std::iter::once(u).chain(self.adj[u].iter().copied()));
            for s in near.filter(|&s| s != e) {
                if let Some(x) = value.get(&s) {
                    assert!(known.contains(x), "value of entity {s} did not reach entity {e}");
                }
            }
        }
        Ok(())
    }
}

fn sort(mut out: Outbox) -> Outbox {
    for msgs in &mut out {
        msgs.sort_by_key(|&(p, _)| p);
    }
    out
}

/// Round costs of cluster-graph operations composed from the aggregation
/// primitives over Steiner trees of depth `r` with per-tree bandwidth `b'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClusterCosts {
    pub r: usize,
    pub per_tree: Option<u32>,
    pub bandwidth: Option<u32>,
}

impl ClusterCosts {
    pub fn exchange(&self, bits: usize) -> u64 {
        exchange_rounds(Some(bits), self.bandwidth)
    }

    pub fn broadcast(&self, bits: usize) -> u64 {
        broadcast_rounds(self.r, bits as u32, self.per_tree)
    }

    pub fn min(&self, bits: usize) -> u64 {
        min_rounds(self.r, bits as u32, self.per_tree)
    }

    pub fn convergecast(&self, bits: usize, cap: usize) -> u64 {
        convergecast_rounds(self.r, bits as u32, cap, self.per_tree)
    }

    /// One cluster-graph hop: the root broadcasts a flagged value to the
    /// edge endpoints, they cross the embodying edges, and the receiving
    /// trees convergecast up to 11 values to their roots.
    pub fn hop(&self, bits: usize) -> u64 {
        self.broadcast(bits + 1) + self.exchange(bits) + self.convergecast(bits, 11)
    }

    /// A hop that forwards the up-to-11 values a root heard.
    pub fn relay(&self, bits: usize) -> u64 {
        self.broadcast(11 * (bits + 1)) + self.exchange(11 * bits) + self.convergecast(bits, 121)
    }
}

/// Books a round count in either mode.
pub fn book(sess: &mut Session<'_>, rounds: u64, label: &str) -> Result<(), ColorError> {
    if sess.is_faithful() {
        sess.fast_forward(rounds, label);
    } else {
        sess.charge(rounds, label)?;
    }
    Ok(())
}

/// `(H')²` over a cluster graph: each virtual round is a hop and a relay.
pub struct ClusterNet {
    pub costs: ClusterCosts,
}

impl VirtualNet for ClusterNet {
    fn announce(&mut self, sess: &mut Session<'_>, _senders: &[(usize, u64)], width: u32) -> Result<(), ColorError> {
        let c = self.costs;
        book(sess, c.hop(width as usize) + c.relay(width as usize), "color.mis")
    }
}
