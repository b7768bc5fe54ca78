use congest_sim::{Bits, ModelConfig, Outbox, RoundMetrics, Session};
use decomposition::Decomposition;
use graph_core::{ceil_log2, Graph, IdAssignment};
use tree_aggregation::{
    pipelined_broadcast_bits, pipelined_convergecast, pipelined_sum, plan_channels, RootedTree,
};

use crate::AppError;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Task {
    Mis,
    Coloring { delta: usize },
}

pub(crate) struct Outcome {
    /// Node → answer; `0` means undecided (never for a coloring).
    pub answers: Vec<u64>,
    pub metrics: RoundMetrics,
}

// Item kinds. An item is `kind | a | x` with `a` a tree position.
const EDGE: u64 = 0;
const FACT: u64 = 1;
const ID_HI: u64 = 2;
const ID_LO: u64 = 3;

/// Bit widths every node derives from globally known `n`, `Δ` and `b`.
struct Layout {
    /// Tree positions.
    w: u32,
    /// Cluster indices.
    wc: u32,
    /// One answer.
    ab: u32,
    /// The `x` field of an item.
    xw: u32,
    /// Low identifier part; a high part exists when `b > 32`.
    lo: u32,
    hi: u32,
    item_bits: u32,
    count_bits: u32,
}

impl Layout {
    fn new(g: &Graph, ids: &IdAssignment, d: &Decomposition, task: Task) -> Result<Self, AppError> {
        let max_len = d.clusters.iter().map(|c| c.tree.len()).max().unwrap_or(1);
        let w = ceil_log2(max_len).max(1);
        let wc = ceil_log2(d.clusters.len()).max(1);
        let ab = match task {
            Task::Mis => 1,
            Task::Coloring { delta } => ceil_log2(delta + 2).max(1),
        };
        let lo = ids.b().clamp(1, 32);
        let hi = ids.b().saturating_sub(32);
        let xw = w.max(lo).max(hi).max(ab);
        let item_bits = 2 + w + xw;
        if item_bits > 64 {
            return Err(AppError::Shape(format!("items of {item_bits} bits exceed one word")));
        }
        // At most two id parts, one edge and one fact per neighbor.
        let count_bits = ceil_log2(2 * g.max_degree() + 3).max(1);
        Ok(Layout { w, wc, ab, xw, lo, hi, item_bits, count_bits })
    }

    fn item(&self, kind: u64, a: usize, x: u64) -> u64 {
        kind << (self.w + self.xw) | (a as u64) << self.xw | x
    }

    fn split(&self, item: u64) -> (u64, usize, u64) {
        let x = item & ((1u64 << self.xw) - 1);
        let a = (item >> self.xw) & ((1u64 << self.w) - 1);
        (item >> (self.w + self.xw), a as usize, x)
    }
}

fn precheck(g: &Graph, ids: &IdAssignment, d: &Decomposition) -> Result<(), AppError> {
    if d.n != g.n() || ids.len() != g.n() {
        return Err(AppError::Shape(format!("graph has {} nodes, decomposition {}, ids {}", g.n(), d.n, ids.len())));
    }
    let record = verify::parse_decomposition(&d.to_text()).map_err(|e| AppError::Invalid(e.to_string()))?;
    let report = verify::check_decomposition(g, &record, &verify::Bounds::none());
    if let Some(c) = report.failures().next() {
        return Err(AppError::Invalid(format!("{}: {}", c.name, c.witness.as_deref().unwrap_or(""))));
    }
    Ok(())
}

/// Answers of one cluster as a bit string indexed by tree position.
/// `got` holds every item its members sent.
fn solve(layout: &Layout, task: Task, len: usize, got: &[u64]) -> Result<Bits, AppError> {
    let mut key: Vec<Option<u64>> = vec![None; len];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut facts: Vec<Vec<u64>> = vec![Vec::new(); len];
    let mut edges = Vec::new();
    for &item in got {
        let (kind, a, x) = layout.split(item);
        match kind {
            EDGE => edges.push((a, x as usize)),
            FACT => facts[a].push(x),
            ID_HI => key[a] = Some(key[a].unwrap_or(0) | x << layout.lo),
            _ => key[a] = Some(key[a].unwrap_or(0) | x),
        }
    }
    // Edges to members that sent nothing (already decided) are dropped.
    for (a, b) in edges {
        if key[a].is_some() && key[b].is_some() {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut order: Vec<usize> = (0..len).filter(|&p| key[p].is_some()).collect();
    order.sort_by_key(|&p| key[p]);
    let mut answer = vec![0u64; len];
    for &p in &order {
        answer[p] = match task {
            Task::Mis => adj[p].iter().all(|&q| answer[q] != 1) as u64,
            Task::Coloring { delta } => {
                let taken = |c: u64| facts[p].contains(&c) || adj[p].iter().any(|&q| answer[q] == c);
                (1..=delta as u64 + 1).find(|&c| !taken(c)).ok_or(AppError::Infeasible { node: p })?
            }
        };
    }
    let mut bits = Bits::new();
    for a in answer {
        bits.push_uint(a, layout.ab);
    }
    Ok(bits)
}

pub(crate) fn run(
    g: &Graph,
    ids: &IdAssignment,
    d: &Decomposition,
    cfg: ModelConfig,
    task: Task,
) -> Result<Outcome, AppError> {
    precheck(g, ids, d)?;
    let n = g.n();
    let mut sess = Session::new(g, ids, cfg);
    if n == 0 {
        return Ok(Outcome { answers: Vec::new(), metrics: sess.into_metrics() });
    }
    let layout = Layout::new(g, ids, d, task)?;
    let pos_of = |v: usize| d.clusters[d.cluster_of[v]].tree.position(v).expect("member lies on its tree");

    // Every node tells its neighbors its cluster and tree position, so it
    // later knows which of its edges stay inside its cluster.
    let out: Outbox = (0..n)
        .map(|v| {
            let mut b = Bits::new();
            b.push_uint(d.cluster_of[v] as u64, layout.wc);
            b.push_uint(pos_of(v) as u64, layout.w);
            (0..g.degree(v)).map(|p| (p, b.clone())).collect()
        })
        .collect();
    let inbox = sess.exchange("app-setup", out)?;
    let mates: Vec<Vec<usize>> = inbox
        .iter()
        .enumerate()
        .map(|(v, msgs)| {
            msgs.iter()
                .filter_map(|(_, b)| {
                    let mut r = b.reader();
                    let c = r.uint(layout.wc) as usize;
                    let p = r.uint(layout.w) as usize;
                    (c == d.cluster_of[v]).then_some(p)
                })
                .collect()
        })
        .collect();

    let mut answers = vec![0u64; n];
    // What each node heard from decided neighbors: selected flags or colors.
    let mut heard: Vec<Vec<u64>> = vec![Vec::new(); n];
    let colors = d.colors();
    for j in 1..=colors {
        let trees: Vec<&RootedTree> = d.clusters.iter().filter(|c| c.color == j).map(|c| &c.tree).collect();
        let plan = plan_channels(&trees, cfg.bandwidth)?;
        let items: Vec<Vec<Vec<u64>>> = trees
            .iter()
            .map(|t| {
                (0..t.len())
                    .map(|pos| {
                        let v = t.node_at(pos);
                        let live = match task {
                            Task::Mis => heard[v].is_empty(),
                            Task::Coloring { .. } => true,
                        };
                        if !t.terminal_at(pos) || !live {
                            return Vec::new();
                        }
                        let id = ids.id(v);
                        let mut list = vec![layout.item(ID_LO, pos, id & ((1u64 << layout.lo) - 1))];
                        if layout.hi > 0 {
                            list.push(layout.item(ID_HI, pos, id >> layout.lo));
                        }
                        list.extend(mates[v].iter().filter(|&&q| q > pos).map(|&q| layout.item(EDGE, pos, q as u64)));
                        let mut seen = heard[v].clone();
                        seen.sort_unstable();
                        seen.dedup();
                        list.extend(seen.into_iter().map(|c| layout.item(FACT, pos, c)));
                        list
                    })
                    .collect()
            })
            .collect();
        let counts: Vec<Vec<u64>> =
            items.iter().map(|per| per.iter().map(|l| l.len() as u64).collect()).collect();
        let totals = pipelined_sum(&mut sess, "app-count", &trees, &counts, layout.count_bits, &plan)?;
        let cap = totals.per_tree.iter().copied().max().unwrap_or(0) as usize;
        if cap == 0 {
            continue;
        }
        let gathered = pipelined_convergecast(&mut sess, "app-gather", &trees, &items, layout.item_bits, cap, &plan)?;
        let messages = trees
            .iter()
            .zip(&gathered.per_tree)
            .map(|(t, got)| {
                solve(&layout, task, t.len(), got).map_err(|e| match e {
                    AppError::Infeasible { node } => AppError::Infeasible { node: t.node_at(node) },
                    e => e,
                })
            })
            .collect::<Result<Vec<Bits>, AppError>>()?;
        let spread = pipelined_broadcast_bits(&mut sess, "app-scatter", &trees, &messages, &plan)?;
        let ab = layout.ab as usize;
        let mut decided = Vec::new();
        for (t, per) in trees.iter().zip(&spread.per_tree) {
            for pos in (0..t.len()).filter(|&p| t.terminal_at(p)) {
                let a = per[pos].slice(pos * ab, (pos + 1) * ab).reader().uint(layout.ab);
                if a != 0 {
                    answers[t.node_at(pos)] = a;
                    decided.push(t.node_at(pos));
                }
            }
        }
        if j == colors {
            break;
        }
        let mut out: Outbox = vec![Vec::new(); n];
        for &v in &decided {
            let b = Bits::from_uint(answers[v], layout.ab);
            out[v] = (0..g.degree(v)).map(|p| (p, b.clone())).collect();
        }
        for (v, msgs) in sess.exchange("app-announce", out)?.into_iter().enumerate() {
            heard[v].extend(msgs.into_iter().map(|(_, b)| b.reader().uint(layout.ab)));
        }
    }
    Ok(Outcome { answers, metrics: sess.into_metrics() })
}
