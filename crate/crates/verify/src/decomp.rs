use graph_core::{ceil_log2, Graph};
use rayon::prelude::*;

use crate::{CheckReport, FormatError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeLine {
    pub node: usize,
    pub parent: Option<usize>,
    pub terminal: bool,
}

/// A decomposition as read from its record; nothing here is trusted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompRecord {
    pub variant: String,
    pub n: usize,
    pub id_bits: u32,
    /// Carving `b` and `L`; both 0 for hand-built records.
    pub carve_b: u32,
    pub l: u32,
    pub phases: u32,
    pub steps: u32,
    pub color: Vec<u32>,
    pub cluster_of: Vec<usize>,
    /// Per cluster, tree lines in file order.
    pub trees: Vec<Vec<TreeLine>>,
}

impl DecompRecord {
    /// A record without carving parameters, e.g. for hand-built partitions.
    pub fn from_parts(color: Vec<u32>, cluster_of: Vec<usize>, trees: Vec<Vec<TreeLine>>) -> Self {
        DecompRecord {
            variant: "manual".into(),
            n: color.len(),
            id_bits: 0,
            carve_b: 0,
            l: 0,
            phases: 0,
            steps: 0,
            color,
            cluster_of,
            trees,
        }
    }

    pub fn colors(&self) -> u32 {
        self.color.iter().copied().max().unwrap_or(0)
    }
}

fn field<T: std::str::FromStr>(parts: &[&str], key: &str, line: usize) -> Result<T, FormatError> {
    let raw = parts
        .iter()
        .find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| FormatError::new(line, format!("missing `{key}=`")))?;
    raw.parse().map_err(|_| FormatError::new(line, format!("`{key}={raw}` is not a number")))
}

fn int<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, FormatError> {
    s.parse().map_err(|_| FormatError::new(line, format!("`{s}` is not a number")))
}

pub fn parse_decomposition(text: &str) -> Result<DecompRecord, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "decomposition v1")) => {}
        Some((i, _)) => return Err(FormatError::new(i, "expected `decomposition v1`")),
        None => return Err(FormatError::new(1, "empty input")),
    }
    let (i, head) = lines.next().ok_or_else(|| FormatError::new(2, "missing `variant` line"))?;
    let parts: Vec<&str> = head.split_whitespace().collect();
    if parts.first() != Some(&"variant") || parts.len() < 2 {
        return Err(FormatError::new(i, "expected `variant <name> ...`"));
    }
    let variant = parts[1].to_string();
    let n: usize = field(&parts, "n", i)?;
    let id_bits = field(&parts, "b", i)?;
    let (i, head) = lines.next().ok_or_else(|| FormatError::new(3, "missing `params` line"))?;
    let parts: Vec<&str> = head.split_whitespace().collect();
    if parts.first() != Some(&"params") {
        return Err(FormatError::new(i, "expected `params`"));
    }
    let (carve_b, l, phases, steps) = (field(&parts, "b", i)?, field(&parts, "L", i)?, field(&parts, "phases", i)?, field(&parts, "steps", i)?);

    let mut color = vec![0u32; n];
    let mut cluster_of = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut trees: Vec<Vec<TreeLine>> = Vec::new();
    let mut ended = false;
    for (i, line) in lines {
        let p: Vec<&str> = line.split_whitespace().collect();
        match (p[0], p.len()) {
            ("c", 4) => {
                let v: usize = int(p[1], i)?;
                if v >= n {
                    return Err(FormatError::new(i, format!("node {v} out of range for n = {n}")));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(FormatError::new(i, format!("node {v} listed twice")));
                }
                color[v] = int(p[2], i)?;
                cluster_of[v] = int(p[3], i)?;
            }
            ("t", 5) => {
                let k: usize = int(p[1], i)?;
                let node: usize = int(p[2], i)?;
                if node >= n {
                    return Err(FormatError::new(i, format!("tree node {node} out of range for n = {n}")));
                }
                let parent = match p[3] {
                    "-" => None,
                    s => Some(int(s, i)?),
                };
                let terminal = match p[4] {
                    "0" => false,
                    "1" => true,
                    s => return Err(FormatError::new(i, format!("terminal flag `{s}`"))),
                };
                if k > trees.len() {
                    return Err(FormatError::new(i, format!("tree {k} before tree {}", trees.len())));
                }
                if k == trees.len() {
                    trees.push(Vec::new());
                }
                trees[k].push(TreeLine { node, parent, terminal });
            }
            ("stat", _) => {}
            ("end", 1) => {
                ended = true;
                break;
            }
            (tag, _) => return Err(FormatError::new(i, format!("unexpected record `{tag}`"))),
        }
    }
    if !ended {
        return Err(FormatError::new(text.lines().count().max(1), "missing `end`"));
    }
    Ok(DecompRecord { variant, n, id_bits, carve_b, l, phases, steps, color, cluster_of, trees })
}

/// Limits for [`check_decomposition`]; `None` measures without judging.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bounds {
    pub colors: Option<u32>,
    pub diameter: Option<usize>,
    pub radius: Option<usize>,
    pub overlap: Option<usize>,
}

impl Bounds {
    pub fn none() -> Self {
        Bounds::default()
    }

    /// Limits implied by a record's header. Token carvings: weak diameter
    /// `112·L²`, tree radius `56·L²`, overlap `6L + 2`. Baseline carvings:
    /// radius `phases·steps`, diameter twice that, overlap `phases + 1`.
    pub fn for_record(rec: &DecompRecord) -> Self {
        let colors = Some(ceil_log2(rec.n) + 1);
        let l = rec.l as usize;
        match rec.variant.as_str() {
            "fast" | "fast-id" => Bounds { colors, diameter: Some(112 * l * l), radius: Some(56 * l * l), overlap: Some(6 * l + 2) },
            "rg" | "slow-id" => {
                let r = rec.phases as usize * rec.steps as usize;
                Bounds { colors, diameter: Some(2 * r), radius: Some(r), overlap: Some(rec.phases as usize + 1) }
            }
            _ => Bounds { colors, ..Bounds::none() },
        }
    }
}

/// Reusable BFS buffers. Entries are valid only when stamped with the
/// current epoch, so nothing is cleared between searches.
struct Scratch {
    dist: Vec<u32>,
    seen: Vec<u32>,
    target: Vec<u32>,
    epoch: u32,
    target_epoch: u32,
    queue: Vec<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { dist: vec![0; n], seen: vec![0; n], target: vec![0; n], epoch: 0, target_epoch: 0, queue: Vec::new() }
    }

    /// Distances from `src`, exact up to `limit`; stops once every target
    /// is reached. Unreached nodes read as unstamped.
    fn bfs(&mut self, g: &Graph, src: usize, mut left: usize, limit: usize) {
        self.epoch += 1;
        let e = self.epoch;
        self.queue.clear();
        self.queue.push(src);
        self.seen[src] = e;
        self.dist[src] = 0;
        let mut head = 0;
        while head < self.queue.len() && left > 0 {
            let u = self.queue[head];
            head += 1;
            let du = self.dist[u];
            if du as usize >= limit {
                break;
            }
            for &w in g.neighbors(u) {
                if self.seen[w] != e {
                    self.seen[w] = e;
                    self.dist[w] = du + 1;
                    if self.target[w] == self.target_epoch {
                        left -= 1;
                    }
                    self.queue.push(w);
                }
            }
        }
    }

    fn weak_diameter(&mut self, g: &Graph, members: &[usize], limit: usize) -> Option<(usize, (usize, usize))> {
        self.target_epoch += 1;
        for &v in members {
            self.target[v] = self.target_epoch;
        }
        let mut best = (0, (members[0], members[0]));
        for &u in members {
            self.bfs(g, u, members.len() - 1, limit);
            for &w in members {
                let x = if self.seen[w] == self.epoch { self.dist[w] as usize } else { usize::MAX };
                if x > limit {
                    return None;
                }
                if x > best.0 {
                    best = (x, (u, w));
                }
            }
        }
        Some(best)
    }
}

/// Largest distance in `g` between two members of a nonempty set, or `None`
/// once it exceeds `limit`.
pub fn weak_diameter(g: &Graph, members: &[usize], limit: usize) -> Option<(usize, (usize, usize))> {
    Scratch::new(g.n()).weak_diameter(g, members, limit)
}

/// Coverage, same-color non-adjacency, Steiner tree shape, weak diameter,
/// radius, per-color overlap and color count.
pub fn check_decomposition(g: &Graph, rec: &DecompRecord, bounds: &Bounds) -> CheckReport {
    let mut r = CheckReport::new();
    let n = g.n();
    if rec.n != n || rec.color.len() != n || rec.cluster_of.len() != n {
        r.fail("format", format!("record has n = {}, graph has n = {n}", rec.n));
        return r;
    }
    r.pass("format");
    let k = rec.trees.len();

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cl_color = vec![0u32; k];
    r.pass("coverage");
    for v in 0..n {
        let (c, cl) = (rec.color[v], rec.cluster_of[v]);
        if c == 0 || cl >= k {
            r.fail("coverage", format!("node {v} has color {c} and cluster {cl} of {k}"));
            continue;
        }
        if cl_color[cl] != 0 && cl_color[cl] != c {
            r.fail("coverage", format!("cluster {cl} holds colors {} and {c} (node {v})", cl_color[cl]));
        }
        cl_color[cl] = c;
        members[cl].push(v);
    }
    if let Some(c) = members.iter().position(Vec::is_empty) {
        r.fail("coverage", format!("cluster {c} has no members"));
    }
    if !r.ok() {
        return r;
    }

    r.pass("non_adjacency");
    for (u, v) in g.edges() {
        let (a, b) = (rec.cluster_of[u], rec.cluster_of[v]);
        if a != b && rec.color[u] == rec.color[v] {
            r.fail("non_adjacency", format!("edge {u}-{v} joins clusters {a} and {b} of color {}", rec.color[u]));
            break;
        }
    }

    r.pass("steiner");
    let mut max_radius = 0;
    let mut depth = vec![0usize; n];
    let mut mark = vec![usize::MAX; n];
    for (c, tree) in rec.trees.iter().enumerate() {
        let mut terms = Vec::new();
        for (j, t) in tree.iter().enumerate() {
            if mark[t.node] == c {
                r.fail("steiner", format!("tree {c}: node {} appears twice", t.node));
                break;
            }
            match (j, t.parent) {
                (0, None) => depth[t.node] = 0,
                (0, Some(_)) | (_, None) => {
                    r.fail("steiner", format!("tree {c}: line {j} (node {}) has the wrong root shape", t.node));
                    break;
                }
                (_, Some(p)) => {
                    if p >= n || mark[p] != c {
                        r.fail("steiner", format!("tree {c}: parent {p} of node {} not yet in the tree", t.node));
                        break;
                    }
                    if !g.has_edge(p, t.node) {
                        r.fail("steiner", format!("tree {c}: edge {p}-{} is not in G", t.node));
                        break;
                    }
                    depth[t.node] = depth[p] + 1;
                }
            }
            mark[t.node] = c;
            max_radius = max_radius.max(depth[t.node]);
            if t.terminal {
                terms.push(t.node);
            }
        }
        terms.sort_unstable();
        if terms != members[c] {
            r.fail("steiner", format!("tree {c}: terminals {terms:?} differ from members {:?}", members[c]));
        }
    }
    r.measure("max_radius", max_radius);
    if let Some(b) = bounds.radius {
        r.expect("radius", max_radius <= b, || format!("a tree has radius {max_radius} > {b}"));
    }

    let limit = bounds.diameter.unwrap_or(usize::MAX - 1);
    let diam: Vec<(usize, Option<(usize, (usize, usize))>)> =
        members
            .par_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map_init(|| Scratch::new(n), |s, (c, m)| (c, s.weak_diameter(g, m, limit)))
            .collect();
    let mut max_diam = 0;
    r.pass("weak_diameter");
    for (c, d) in diam {
        match d {
            Some((x, _)) => max_diam = max_diam.max(x),
            None => r.fail(
                "weak_diameter",
                format!("cluster {c} has two members at distance > {}", bounds.diameter.map_or("∞".into(), |b| b.to_string())),
            ),
        }
    }
    r.measure("max_weak_diameter", max_diam);

    let colors = rec.colors();
    let mut max_overlap = 0;
    let mut load = vec![0usize; n];
    for color in 1..=colors {
        load.iter_mut().for_each(|x| *x = 0);
        for (c, tree) in rec.trees.iter().enumerate() {
            if cl_color[c] != color {
                continue;
            }
            for t in tree {
                load[t.node] += 1;
                if load[t.node] > max_overlap {
                    max_overlap = load[t.node];
                    if bounds.overlap.is_some_and(|b| max_overlap > b) {
                        r.fail("overlap", format!("node {} lies in {max_overlap} trees of color {color}", t.node));
                    }
                }
            }
        }
    }
    if bounds.overlap.is_some() {
        r.pass("overlap");
    }
    r.measure("max_overlap", max_overlap);

    if let Some(b) = bounds.colors {
        r.expect("colors", colors <= b, || format!("{colors} colors > {b}"));
    }
    r.measure("colors", colors);
    r.measure("clusters", k);
    r
}
