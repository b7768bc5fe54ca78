//! Network decompositions by repeated carving: carve the remaining nodes,
//! give the kept clusters the next color, remove them, repeat. Each carve
//! keeps at least half of what remains, so at most `⌈log2 n⌉ + 1` colors
//! are used.
//!
//! Four carvings are available: the token carving on identifier bits, the
//! baseline on identifier bits, the baseline on balanced cluster colorings,
//! and the token carving on per-level balanced colorings. The last two
//! never read identifier bits as colors, so their clusterings do not change
//! when identifiers are padded to a wider width.

mod oracle;
mod record;

use ball_carving::{carve_in, carve_rg_balanced_in, carve_rg_in, BitSource, CarveError, CarveOutcome, CarveParams, CarveTrace};
use balanced_coloring::bfs_radius;
use congest_sim::{ModelConfig, RoundMetrics, Session};
use graph_core::{ceil_log2, Graph, IdAssignment};
use thiserror::Error;
use tree_aggregation::RootedTree;

pub use oracle::{ClusterGraphOracle, LevelOracle};

#[derive(Debug, Error)]
pub enum DecompError {
    #[error(transparent)]
    Carve(#[from] CarveError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("no progress: a carve kept no node of {0}")]
    Stuck(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Token carving on identifier bits.
    Fast,
    /// Baseline carving on identifier bits.
    Rg,
    /// Baseline carving on balanced cluster colorings.
    SlowId,
    /// Token carving on per-level balanced colorings.
    FastId,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Fast, Variant::Rg, Variant::SlowId, Variant::FastId];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fast => "fast",
            Variant::Rg => "rg",
            Variant::SlowId => "slow-id",
            Variant::FastId => "fast-id",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Variant::ALL.into_iter().find(|v| v.name() == s)
    }
}

/// Carving schedule of a run. `radius` is 0 except for [`Variant::FastId`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub b: u32,
    pub l: u32,
    pub phases: u32,
    pub steps: u32,
    pub radius: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// 1-based.
    pub color: u32,
    /// Ascending.
    pub members: Vec<usize>,
    /// Terminals are exactly the members.
    pub tree: RootedTree,
}

/// One carve of the outer loop.
#[derive(Clone, Debug)]
pub struct CarveRecord {
    pub color: u32,
    pub s_len: usize,
    pub survivors: usize,
    pub kills: usize,
    pub max_changes: u32,
    pub tokens_created: u128,
    pub rounds: u64,
    pub trace: CarveTrace,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub variant: Variant,
    pub n: usize,
    /// Identifier width.
    pub b: u32,
    /// Seed of the input graph, carried for the record only.
    pub seed: u64,
    pub params: Params,
    /// Node → color, 1-based.
    pub color: Vec<u32>,
    /// Node → index into `clusters`.
    pub cluster_of: Vec<usize>,
    pub clusters: Vec<Cluster>,
    pub carves: Vec<CarveRecord>,
    /// Nodes killed over all carves and later re-carved.
    pub killed: usize,
    pub metrics: RoundMetrics,
}

impl Decomposition {
    pub fn colors(&self) -> u32 {
        self.color.iter().copied().max().unwrap_or(0)
    }

    pub fn max_tree_depth(&self) -> usize {
        self.clusters.iter().map(|c| c.tree.depth()).max().unwrap_or(0)
    }

    /// Most trees of one color through a single node.
    pub fn max_overlap(&self) -> usize {
        let mut load = vec![0usize; self.n];
        let mut best = 0;
        for color in 1..=self.colors() {
            load.iter_mut().for_each(|x| *x = 0);
            for cl in self.clusters.iter().filter(|c| c.color == color) {
                for &v in cl.tree.nodes() {
                    load[v] += 1;
                    best = best.max(load[v]);
                }
            }
        }
        best
    }

    pub fn kills(&self) -> usize {
        self.killed
    }
}

/// Smallest `k ≥ 0` with `(4/3)^k ≥ n`.
pub fn log43_ceil(n: usize) -> u32 {
    let mut k = 0;
    let mut x = 1.0f64;
    while x < n as f64 {
        x *= 4.0 / 3.0;
        k += 1;
    }
    k
}

/// Phase count of the identifier-independent carvings, `1 + ⌈log_{4/3} n⌉`.
pub fn id_free_b(n: usize) -> u32 {
    1 + log43_ceil(n)
}

fn baseline_steps(b: u32, n: usize) -> u32 {
    (2.0 * b as f64 * (n.max(1) as f64).log2()).ceil() as u32 + 1
}

/// Carving parameters a variant uses on an `n`-node graph with `b`-bit ids.
pub fn params_for(variant: Variant, n: usize, b: u32) -> Params {
    let rg = |phases: u32| Params { b: phases, l: phases + ceil_log2(n), phases, steps: baseline_steps(phases, n), radius: 0 };
    match variant {
        Variant::Fast => {
            let p = CarveParams::new(b, n, BitSource::IdBits);
            Params { b, l: p.l, phases: p.phases, steps: p.steps_per_phase, radius: 0 }
        }
        Variant::Rg => rg(b),
        Variant::SlowId => rg(id_free_b(n)),
        Variant::FastId => {
            let bi = id_free_b(n);
            let p = CarveParams::new(bi, n, BitSource::BalancedColors);
            Params { b: bi, l: p.l, phases: p.phases, steps: p.steps_per_phase, radius: bfs_radius(n, bi) }
        }
    }
}

/// One carve of `s` by `variant` on the session's network.
pub fn carve_variant(sess: &mut Session<'_>, variant: Variant, s: &[usize]) -> Result<CarveOutcome, CarveError> {
    let n = sess.graph().n();
    let b = sess.ids().b();
    let p = params_for(variant, n, b);
    match variant {
        Variant::Fast => carve_in(sess, s, &CarveParams::new(b, n, BitSource::IdBits), None),
        Variant::Rg => carve_rg_in(sess, s),
        Variant::SlowId => carve_rg_balanced_in(sess, s, p.phases, &mut ClusterGraphOracle),
        Variant::FastId => {
            let params = CarveParams::new(p.b, n, BitSource::BalancedColors);
            carve_in(sess, s, &params, Some(&mut LevelOracle { radius: p.radius }))
        }
    }
}

/// The baseline carving of `s` in a fresh session.
pub fn carve_rg_baseline(g: &Graph, ids: &IdAssignment, s: &[usize], cfg: ModelConfig) -> Result<(CarveOutcome, RoundMetrics), CarveError> {
    ball_carving::carve_rg(g, ids, s, cfg)
}

/// The baseline carving on balanced cluster colorings, `1 + ⌈log_{4/3} n⌉`
/// phases, in a fresh session.
pub fn carve_id_independent_slow(g: &Graph, ids: &IdAssignment, s: &[usize], cfg: ModelConfig) -> Result<(CarveOutcome, RoundMetrics), CarveError> {
    let mut sess = Session::new(g, ids, cfg);
    let out = carve_variant(&mut sess, Variant::SlowId, s)?;
    Ok((out, sess.into_metrics()))
}

/// Carves the remaining nodes until none are left; carve `j` yields color `j`.
pub fn decompose(g: &Graph, ids: &IdAssignment, cfg: ModelConfig, variant: Variant) -> Result<Decomposition, DecompError> {
    let n = g.n();
    let mut sess = Session::new(g, ids, cfg);
    let mut color = vec![0u32; n];
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters = Vec::new();
    let mut carves = Vec::new();
    let mut s: Vec<usize> = (0..n).collect();
    let mut j = 0;
    while !s.is_empty() {
        j += 1;
        let before = sess.metrics().rounds_total;
        let out = carve_variant(&mut sess, variant, &s)?;
        if out.survivors.is_empty() {
            return Err(DecompError::Stuck(s.len()));
        }
        for cl in &out.clusters {
            for &v in &cl.members {
                color[v] = j;
                cluster_of[v] = clusters.len();
            }
            clusters.push(Cluster { color: j, members: cl.members.clone(), tree: cl.steiner.clone() });
        }
        s.retain(|&v| color[v] == 0);
        carves.push(CarveRecord {
            color: j,
            s_len: out.s_len,
            survivors: out.survivors.len(),
            kills: out.kills,
            max_changes: out.max_changes,
            tokens_created: out.tokens_created,
            rounds: sess.metrics().rounds_total - before,
            trace: out.trace,
        });
    }
    Ok(Decomposition {
        variant,
        n,
        b: ids.b(),
        seed: 0,
        params: params_for(variant, n, ids.b()),
        color,
        cluster_of,
        clusters,
        killed: carves.iter().map(|c| c.kills).sum(),
        carves,
        metrics: sess.into_metrics(),
    })
}

pub fn decompose_fast(g: &Graph, ids: &IdAssignment, cfg: ModelConfig) -> Result<Decomposition, DecompError> {
    decompose(g, ids, cfg, Variant::Fast)
}

pub fn decompose_rg(g: &Graph, ids: &IdAssignment, cfg: ModelConfig) -> Result<Decomposition, DecompError> {
    decompose(g, ids, cfg, Variant::Rg)
}

pub fn decompose_slow_id_independent(g: &Graph, ids: &IdAssignment, cfg: ModelConfig) -> Result<Decomposition, DecompError> {
    decompose(g, ids, cfg, Variant::SlowId)
}

pub fn decompose_fast_id_independent(g: &Graph, ids: &IdAssignment, cfg: ModelConfig) -> Result<Decomposition, DecompError> {
    decompose(g, ids, cfg, Variant::FastId)
}
