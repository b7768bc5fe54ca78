//! Versioned text form of a decomposition.
//!
//! ```text
//! decomposition v1
//! variant <name> n=<n> b=<id bits> seed=<seed>
//! params b=<carve b> L=<L> phases=<phases> steps=<steps> radius=<radius>
//! c <node> <color> <cluster>
//! t <cluster> <node> <parent|-> <0|1>
//! stat colors=<C> clusters=<k> max_depth=<d> max_overlap=<p> kills=<k> rounds=<r>
//! end
//! ```
//!
//! Tree lines of one cluster come in tree order, parents first. Carve
//! records are not stored; kills and rounds survive through the stat line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use congest_sim::{Mode, RoundMetrics};
use tree_aggregation::RootedTree;

use crate::{Cluster, DecompError, Decomposition, Params, Variant};

fn err(line: usize, msg: impl Into<String>) -> DecompError {
    DecompError::Parse { line, msg: msg.into() }
}

/// `key=value` fields after the tag, in order.
fn kv(line: &str, lineno: usize, keys: &[&str]) -> Result<Vec<String>, DecompError> {
    let parts: Vec<&str> = line.split_whitespace().skip(1).collect();
    let mut out = Vec::new();
    for key in keys {
        let val = parts
            .iter()
            .find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
            .ok_or_else(|| err(lineno, format!("missing `{key}=`")))?;
        out.push(val.to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T, DecompError> {
    s.parse().map_err(|_| err(lineno, format!("`{s}` is not a number")))
}

impl Decomposition {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::from("decomposition v1\n");
        let _ = writeln!(out, "variant {} n={} b={} seed={}", self.variant.name(), self.n, self.b, self.seed);
        let _ = writeln!(out, "params b={} L={} phases={} steps={} radius={}", p.b, p.l, p.phases, p.steps, p.radius);
        for v in 0..self.n {
            let _ = writeln!(out, "c {v} {} {}", self.color[v], self.cluster_of[v]);
        }
        for (k, cl) in self.clusters.iter().enumerate() {
            for &v in cl.tree.nodes() {
                let parent = cl.tree.parent_of(v).map_or("-".to_string(), |x| x.to_string());
                let _ = writeln!(out, "t {k} {v} {parent} {}", cl.tree.is_terminal(v) as u8);
            }
        }
        let _ = writeln!(
            out,
            "stat colors={} clusters={} max_depth={} max_overlap={} kills={} rounds={}",
            self.colors(),
            self.clusters.len(),
            self.max_tree_depth(),
            self.max_overlap(),
            self.kills(),
            self.metrics.rounds_total
        );
        out.push_str("end\n");
        out
    }

    /// Parses [`Decomposition::to_text`] output.
    pub fn from_text(text: &str) -> Result<Self, DecompError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "decomposition v1")) => {}
            Some((i, other)) => return Err(err(i, format!("expected `decomposition v1`, found `{other}`"))),
            None => return Err(err(1, "empty input")),
        }
        let (i, line) = lines.next().ok_or_else(|| err(2, "missing variant line"))?;
        if !line.starts_with("variant ") {
            return Err(err(i, "expected `variant`"));
        }
        let name = line.split_whitespace().nth(1).unwrap_or("");
        let variant = Variant::parse(name).ok_or_else(|| err(i, format!("unknown variant `{name}`")))?;
        let f = kv(line, i, &["n", "b", "seed"])?;
        let (n, b, seed): (usize, u32, u64) = (num(&f[0], i)?, num(&f[1], i)?, num(&f[2], i)?);
        let (i, line) = lines.next().ok_or_else(|| err(3, "missing params line"))?;
        if !line.starts_with("params ") {
            return Err(err(i, "expected `params`"));
        }
        let f = kv(line, i, &["b", "L", "phases", "steps", "radius"])?;
        let params = Params { b: num(&f[0], i)?, l: num(&f[1], i)?, phases: num(&f[2], i)?, steps: num(&f[3], i)?, radius: num(&f[4], i)? };

        let mut color = vec![0u32; n];
        let mut cluster_of = vec![usize::MAX; n];
        let mut trees: BTreeMap<usize, RootedTree> = BTreeMap::new();
        let mut stat = None;
        let mut ended = false;
        for (i, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts[0] {
                "c" if parts.len() == 4 => {
                    let v: usize = num(parts[1], i)?;
                    if v >= n {
                        return Err(err(i, format!("node {v} out of range")));
                    }
                    color[v] = num(parts[2], i)?;
                    cluster_of[v] = num(parts[3], i)?;
                }
                "t" if parts.len() == 5 => {
                    let k: usize = num(parts[1], i)?;
                    let v: usize = num(parts[2], i)?;
                    let term = parts[4] == "1";
                    match parts[3] {
                        "-" => {
                            if trees.insert(k, RootedTree::new(v, term)).is_some() {
                                return Err(err(i, format!("cluster {k} has two roots")));
                            }
                        }
                        p => {
                            let p: usize = num(p, i)?;
                            let t = trees.get_mut(&k).ok_or_else(|| err(i, format!("cluster {k} has no root yet")))?;
                            t.add_child(v, p, term).map_err(|e| err(i, e.to_string()))?;
                        }
                    }
                }
                "stat" => {
                    let f = kv(line, i, &["kills", "rounds"])?;
                    stat = Some((num::<usize>(&f[0], i)?, num::<u64>(&f[1], i)?));
                }
                "end" => {
                    ended = true;
                    break;
                }
                tag => return Err(err(i, format!("unexpected record `{tag}`"))),
            }
        }
        if !ended {
            return Err(err(text.lines().count().max(1), "missing `end`"));
        }
        let k = trees.len();
        if trees.keys().copied().ne(0..k) {
            return Err(err(1, "cluster indices are not 0..k"));
        }
        let mut clusters: Vec<Cluster> = trees
            .into_values()
            .map(|tree| Cluster { color: 0, members: Vec::new(), tree })
            .collect();
        for v in 0..n {
            let c = cluster_of[v];
            if c >= k || color[v] == 0 {
                return Err(err(1, format!("node {v} has no cluster or color")));
            }
            clusters[c].members.push(v);
            if clusters[c].color != 0 && clusters[c].color != color[v] {
                return Err(err(1, format!("cluster {c} spans two colors")));
            }
            clusters[c].color = color[v];
        }
        if let Some(c) = clusters.iter().position(|c| c.members.is_empty()) {
            return Err(err(1, format!("cluster {c} has no members")));
        }
        let mut metrics = RoundMetrics::new(Mode::Logical);
        let (killed, rounds) = stat.ok_or_else(|| err(1, "missing `stat` line"))?;
        metrics.rounds_total = rounds;
        Ok(Decomposition { variant, n, b, seed, params, color, cluster_of, clusters, carves: Vec::new(), killed, metrics })
    }
}
