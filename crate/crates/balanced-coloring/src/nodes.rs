use congest_sim::{Bits, Outbox, Session};

use crate::house::{attach, split, square, Attach, OutEdgeChoice};
use crate::mis::linial_mis;
use crate::net::SquareNet;
use crate::{balance_cap, Color, ColorError, RBColoring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeColoring {
    pub coloring: RBColoring,
    pub choice: OutEdgeChoice,
    /// Node → center of its star (heavy center) or `H'` cluster.
    pub center: Vec<usize>,
    pub mis: Vec<bool>,
    pub rounds: u64,
}

fn send(sess: &mut Session<'_>, label: &str, msgs: Vec<(usize, usize, Bits)>) -> Result<Outbox, ColorError> {
    let g = sess.graph();
    let mut out: Outbox = vec![Vec::new(); g.n()];
    for (u, v, bits) in msgs {
        out[u].push((g.port(u, v).expect("messages follow edges"), bits));
    }
    for list in &mut out {
        list.sort_by_key(|&(p, _)| p);
    }
    Ok(sess.exchange(label, out)?)
}

/// Colors every node red or blue, each color on at most `⌊3|V|/4⌋` nodes.
pub fn balanced_color_nodes(sess: &mut Session<'_>) -> Result<NodeColoring, ColorError> {
    let g = sess.graph();
    let ids = sess.ids();
    let n = g.n();
    let b = ids.b();
    if let Some(v) = (0..n).find(|&v| g.degree(v) == 0) {
        return Err(ColorError::Precondition(format!("node {v} is isolated")));
    }
    let start = sess.metrics().rounds_total;
    let idv = ids.ids();

    // Every node learns its neighbors' ids and points at the smallest.
    let all = (0..n).flat_map(|v| g.neighbors(v).iter().map(move |&u| (v, u, Bits::from_uint(idv[v], b))));
    let inbox = send(sess, "color.ids", all.collect())?;
    let out: Vec<usize> = (0..n)
        .map(|v| {
            let (port, _) = inbox[v]
                .iter()
                .min_by_key(|(_, m)| m.reader().uint(b))
                .expect("no isolated nodes");
            g.neighbors(v)[*port]
        })
        .collect();
    let inbox = send(sess, "color.point", (0..n).map(|v| (v, out[v], Bits::from_uint(1, 1))).collect())?;
    let ins: Vec<Vec<usize>> = (0..n).map(|v| inbox[v].iter().map(|&(p, _)| g.neighbors(v)[p]).collect()).collect();
    let choice = OutEdgeChoice::new(out.clone());
    debug_assert!((0..n).all(|v| ins[v].len() == choice.in_degree[v]));

    let mut flags = Vec::new();
    for v in 0..n {
        let mut h: Vec<usize> = ins[v].iter().copied().chain([out[v]]).collect();
        h.sort_unstable();
        h.dedup();
        flags.extend(h.into_iter().map(|u| (v, u, Bits::from_uint(choice.heavy[v] as u64, 1))));
    }
    send(sess, "color.heavy", flags)?;

    // H' restricted to its non-isolated nodes, as MIS entities.
    let light = choice.light_graph();
    let nodes: Vec<usize> = (0..n).filter(|&v| !light[v].is_empty()).collect();
    let mut entity = vec![usize::MAX; n];
    for (e, &v) in nodes.iter().enumerate() {
        entity[v] = e;
    }
    let adj: Vec<Vec<usize>> = nodes.iter().map(|&v| light[v].iter().map(|&u| entity[u]).collect()).collect();
    let eids: Vec<u64> = nodes.iter().map(|&v| idv[v]).collect();
    let mut net = SquareNet { nodes: nodes.clone(), adj: adj.clone() };
    let mis = linial_mis(sess, &square(&adj), &eids, b, &mut net)?;
    let at = attach(&adj, &mis.in_set, &eids);
    h_cluster_rounds(sess, &nodes, &adj, &at, &eids, b)?;

    let mut colors = vec![Color::Uncolored; n];
    let mut center = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, a) in at.iter().enumerate() {
        groups[nodes[a.center]].push(nodes[e]);
        center[nodes[e]] = nodes[a.center];
    }
    // Stars: an isolated light node's pointer target is heavy.
    let leaves: Vec<usize> = (0..n).filter(|&v| !choice.heavy[v] && light[v].is_empty()).collect();
    for &v in &leaves {
        debug_assert!(choice.heavy[out[v]]);
        groups[out[v]].push(v);
        center[v] = out[v];
    }
    for v in (0..n).filter(|&v| choice.heavy[v]) {
        groups[v].push(v);
        center[v] = v;
    }
    send(sess, "color.leaf", leaves.iter().map(|&v| (v, out[v], Bits::from_uint(idv[v], b))).collect())?;
    for group in groups.iter_mut().filter(|g| !g.is_empty()) {
        split(group, idv, &mut colors);
    }
    send(sess, "color.star", leaves.iter().map(|&v| (out[v], v, Bits::from_uint((colors[v] == Color::Blue) as u64, 1))).collect())?;

    let coloring = RBColoring { colors };
    if coloring.max_class() > balance_cap(n) {
        return Err(ColorError::Balance(format!(
            "{} red, {} blue among {n} nodes",
            coloring.count(Color::Red),
            coloring.count(Color::Blue)
        )));
    }
    Ok(NodeColoring { coloring, choice, center, mis: (0..n).map(|v| entity[v] != usize::MAX && mis.in_set[entity[v]]).collect(), rounds: sess.metrics().rounds_total - start })
}

/// Messages that let each `H'` center learn its members and tell them their
/// colors: center ids out two hops, member ids in two hops, colors back.
fn h_cluster_rounds(
    sess: &mut Session<'_>,
    nodes: &[usize],
    adj: &[Vec<usize>],
    at: &[Attach],
    ids: &[u64],
    b: u32,
) -> Result<(), ColorError> {
    let k = nodes.len();
    let id = |e: usize| Bits::from_uint(ids[e], b);
    let hop = |sess: &mut Session<'_>, label: &str, dist: u8| {
        let msgs = (0..k)
            .filter(|&e| at[e].dist <= dist)
            .flat_map(|e| adj[e].iter().map(move |&u| (nodes[e], nodes[u], id(at[e].center))))
            .collect();
        send(sess, label, msgs)
    };
    hop(sess, "color.center", 0)?;
    hop(sess, "color.center", 1)?;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for e in (0..k).filter(|&e| at[e].dist == 2) {
        children[at[e].parent.unwrap()].push(e);
    }
    let up2 = (0..k).filter(|&e| at[e].dist == 2).map(|e| (nodes[e], nodes[at[e].parent.unwrap()], id(e)));
    send(sess, "color.members", up2.collect())?;
    let up1 = (0..k).filter(|&e| at[e].dist == 1).map(|e| {
        let mut list = id(e);
        for &c in &children[e] {
            list.extend(&id(c));
        }
        (nodes[e], nodes[at[e].center], list)
    });
    send(sess, "color.members", up1.collect())?;
    let down1 = (0..k)
        .filter(|&e| at[e].dist == 1)
        .map(|e| (nodes[at[e].center], nodes[e], zeros(1 + children[e].len())));
    send(sess, "color.assign", down1.collect())?;
    let down2 = (0..k).filter(|&e| at[e].dist == 2).map(|e| (nodes[at[e].parent.unwrap()], nodes[e], zeros(1)));
    send(sess, "color.assign", down2.collect())?;
    Ok(())
}

fn zeros(len: usize) -> Bits {
    let mut bits = Bits::new();
    for _ in 0..len {
        bits.push(false);
    }
    bits
}
