//! Edge-list text format.
//!
//! ```text
//! # optional comments
//! p <n> <m>
//! e <u> <v>      (m lines, 0 <= u < v < n)
//! ```
//!
//! Identifier sidecar: `b <bits>` followed by one `i <node> <id>` line per node.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Graph, GraphError, IdAssignment};

fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn read(path: &Path) -> Result<String, GraphError> {
    std::fs::read_to_string(path).map_err(|source| GraphError::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), GraphError> {
    std::fs::write(path, text).map_err(|source| GraphError::Io { path: path.display().to_string(), source })
}

fn fields<'a>(line: &'a str, lineno: usize, tag: &str, count: usize) -> Result<Vec<u64>, GraphError> {
    let mut parts = line.split_whitespace();
    parts.next();
    let vals = parts
        .map(|t| t.parse::<u64>().map_err(|_| parse_err(lineno, format!("`{t}` is not a nonnegative integer"))))
        .collect::<Result<Vec<_>, _>>()?;
    if vals.len() != count {
        return Err(parse_err(lineno, format!("`{tag}` expects {count} fields, found {}", vals.len())));
    }
    Ok(vals)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;
    for (lineno, line) in content_lines(text) {
        last_line = lineno;
        match line.split_whitespace().next() {
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(lineno, "second `p` header"));
                }
                let v = fields(line, lineno, "p", 2)?;
                header = Some((v[0] as usize, v[1] as usize));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(lineno, "edge before `p` header"))?;
                let v = fields(line, lineno, "e", 2)?;
                let (u, w) = (v[0] as usize, v[1] as usize);
                if u >= n || w >= n {
                    return Err(parse_err(lineno, format!("endpoint out of range for n = {n}")));
                }
                if u >= w {
                    return Err(parse_err(lineno, "edge must satisfy u < v"));
                }
                if !seen.insert((u, w)) {
                    return Err(parse_err(lineno, format!("duplicate edge {u} {w}")));
                }
                edges.push((u, w));
            }
            Some(tag) => return Err(parse_err(lineno, format!("unknown record `{tag}`"))),
            None => {}
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(last_line.max(1), "missing `p` header"))?;
    if edges.len() != m {
        return Err(parse_err(last_line.max(1), format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("p {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    parse_graph(&read(path.as_ref())?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    write(path.as_ref(), &write_graph(g))
}

/// Parses an identifier sidecar for an `n`-node graph.
pub fn parse_ids(text: &str, n: usize) -> Result<IdAssignment, GraphError> {
    let mut b = None;
    let mut ids = vec![None; n];
    let mut last_line = 0;
    for (lineno, line) in content_lines(text) {
        last_line = lineno;
        match line.split_whitespace().next() {
            Some("b") => b = Some(fields(line, lineno, "b", 1)?[0] as u32),
            Some("i") => {
                let v = fields(line, lineno, "i", 2)?;
                let node = v[0] as usize;
                if node >= n {
                    return Err(parse_err(lineno, format!("node {node} out of range for n = {n}")));
                }
                if ids[node].replace(v[1]).is_some() {
                    return Err(parse_err(lineno, format!("node {node} listed twice")));
                }
            }
            Some(tag) => return Err(parse_err(lineno, format!("unknown record `{tag}`"))),
            None => {}
        }
    }
    let b = b.ok_or_else(|| parse_err(last_line.max(1), "missing `b` header"))?;
    let ids = ids
        .into_iter()
        .enumerate()
        .map(|(v, id)| id.ok_or_else(|| parse_err(last_line.max(1), format!("node {v} has no identifier"))))
        .collect::<Result<Vec<_>, _>>()?;
    IdAssignment::new(b, ids)
}

pub fn write_ids(ids: &IdAssignment) -> String {
    let mut out = format!("b {}\n", ids.b());
    for (v, id) in ids.ids().iter().enumerate() {
        let _ = writeln!(out, "i {v} {id}");
    }
    out
}

pub fn load_ids(path: impl AsRef<Path>, n: usize) -> Result<IdAssignment, GraphError> {
    parse_ids(&read(path.as_ref())?, n)
}

pub fn save_ids(ids: &IdAssignment, path: impl AsRef<Path>) -> Result<(), GraphError> {
    write(path.as_ref(), &write_ids(ids))
}
