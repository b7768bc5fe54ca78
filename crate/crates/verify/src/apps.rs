use std::collections::VecDeque;

use graph_core::Graph;

use crate::{CheckReport, FormatError};

/// Independence and maximality by a full edge scan.
pub fn check_mis(g: &Graph, selected: &[bool]) -> CheckReport {
    let mut r = CheckReport::new();
    if selected.len() != g.n() {
        r.fail("format", format!("{} flags for {} nodes", selected.len(), g.n()));
        return r;
    }
    r.pass("independent");
    for (u, v) in g.edges() {
        if selected[u] && selected[v] {
            r.fail("independent", format!("edge {u}-{v} has both ends selected"));
            break;
        }
    }
    r.pass("maximal");
    for v in 0..g.n() {
        if !selected[v] && !g.neighbors(v).iter().any(|&w| selected[w]) {
            r.fail("maximal", format!("node {v} and all its neighbors are unselected"));
            break;
        }
    }
    r.measure("size", selected.iter().filter(|&&s| s).count());
    r
}

/// Colors in `1..=palette` and no monochromatic edge.
pub fn check_coloring(g: &Graph, colors: &[u32], palette: u32) -> CheckReport {
    let mut r = CheckReport::new();
    if colors.len() != g.n() {
        r.fail("format", format!("{} colors for {} nodes", colors.len(), g.n()));
        return r;
    }
    r.pass("palette");
    if let Some(v) = (0..g.n()).find(|&v| colors[v] == 0 || colors[v] > palette) {
        r.fail("palette", format!("node {v} has color {} outside 1..={palette}", colors[v]));
    }
    r.pass("proper");
    for (u, v) in g.edges() {
        if colors[u] == colors[v] {
            r.fail("proper", format!("edge {u}-{v} has color {} at both ends", colors[u]));
            break;
        }
    }
    let mut used: Vec<u32> = colors.to_vec();
    used.sort_unstable();
    used.dedup();
    r.measure("colors_used", used.len());
    r
}

/// Every maximal independent set of a graph with at most 20 nodes, as bitmasks.
pub fn brute_force_maximal_sets(g: &Graph) -> Vec<u32> {
    let n = g.n();
    assert!(n <= 20, "brute force is limited to 20 nodes");
    let nbr: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w)).collect();
    (0..1u32 << n)
        .filter(|&s| {
            (0..n).all(|v| {
                let inside = s >> v & 1 == 1;
                let dominated = s & nbr[v] != 0;
                if inside {
                    !dominated
                } else {
                    dominated
                }
            })
        })
        .collect()
}

/// All-pairs distances by BFS; `usize::MAX` marks unreachable pairs.
pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|s| {
            let mut d = vec![usize::MAX; g.n()];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in g.neighbors(u) {
                    if d[w] == usize::MAX {
                        d[w] = d[u] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
        .collect()
}

fn node_field(s: &str, n: usize, line: usize) -> Result<usize, FormatError> {
    let v: usize = s.parse().map_err(|_| FormatError::new(line, format!("`{s}` is not a node")))?;
    if v >= n {
        return Err(FormatError::new(line, format!("node {v} out of range for n = {n}")));
    }
    Ok(v)
}

/// `m <node>` lines.
pub fn parse_mis(text: &str, n: usize) -> Result<Vec<bool>, FormatError> {
    let mut sel = vec![false; n];
    for (i, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()) {
        match line.split_whitespace().collect::<Vec<_>>()[..] {
            ["m", v] => {
                let v = node_field(v, n, i)?;
                if std::mem::replace(&mut sel[v], true) {
                    return Err(FormatError::new(i, format!("node {v} listed twice")));
                }
            }
            _ => return Err(FormatError::new(i, "expected `m <node>`")),
        }
    }
    Ok(sel)
}

/// `col <node> <color>` lines, one per node.
pub fn parse_coloring(text: &str, n: usize) -> Result<Vec<u32>, FormatError> {
    let mut col = vec![0u32; n];
    for (i, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()) {
        match line.split_whitespace().collect::<Vec<_>>()[..] {
            ["col", v, c] => {
                let v = node_field(v, n, i)?;
                let c: u32 = c.parse().map_err(|_| FormatError::new(i, format!("`{c}` is not a color")))?;
                if c == 0 || std::mem::replace(&mut col[v], c) != 0 {
                    return Err(FormatError::new(i, format!("bad color line for node {v}")));
                }
            }
            _ => return Err(FormatError::new(i, "expected `col <node> <color>`")),
        }
    }
    if let Some(v) = col.iter().position(|&c| c == 0) {
        return Err(FormatError::new(text.lines().count().max(1), format!("node {v} has no color")));
    }
    Ok(col)
}
