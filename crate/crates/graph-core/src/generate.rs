use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{load_graph, Graph, GraphError};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Gnp { n: usize, p: f64 },
    Grid { rows: usize, cols: usize },
    Path { n: usize },
    Cycle { n: usize },
    /// Random recursive tree: node `i > 0` attaches to a uniform earlier node.
    Tree { n: usize },
    /// Node 0 is the center.
    Star { n: usize },
    Complete { n: usize },
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphSpec {
    pub family: Family,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GraphSpec { family, seed }
    }

    /// Parses `family:k=v,...`, e.g. `gnp:n=100,p=0.05` or `grid:rows=4,cols=8`.
    pub fn parse(text: &str, seed: u64) -> Result<Self, GraphError> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut kv = BTreeMap::new();
        for part in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| GraphError::Spec(format!("expected key=value, got `{part}`")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let int = |k: &str| -> Result<usize, GraphError> {
            kv.get(k)
                .ok_or_else(|| GraphError::Spec(format!("{name}: missing `{k}`")))?
                .parse()
                .map_err(|_| GraphError::Spec(format!("{name}: `{k}` is not a count")))
        };
        let family = match name {
            "gnp" => {
                let p = kv
                    .get("p")
                    .ok_or_else(|| GraphError::Spec("gnp: missing `p`".into()))?
                    .parse()
                    .map_err(|_| GraphError::Spec("gnp: `p` is not a number".into()))?;
                Family::Gnp { n: int("n")?, p }
            }
            "grid" => Family::Grid { rows: int("rows")?, cols: int("cols")? },
            "path" => Family::Path { n: int("n")? },
            "cycle" => Family::Cycle { n: int("n")? },
            "tree" => Family::Tree { n: int("n")? },
            "star" => Family::Star { n: int("n")? },
            "complete" => Family::Complete { n: int("n")? },
            "file" => Family::File {
                path: kv
                    .get("path")
                    .ok_or_else(|| GraphError::Spec("file: missing `path`".into()))?
                    .into(),
            },
            other => return Err(GraphError::Spec(format!("unknown family `{other}`"))),
        };
        Ok(GraphSpec { family, seed })
    }
}

/// The draw for pair `(i, j)` is the 64-bit value at word `2j` of ChaCha stream `i`.
fn pair_stream(seed: u64, i: usize, j_start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.set_word_pos(2 * j_start as u128);
    rng
}

fn unit(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

pub fn generate(spec: &GraphSpec) -> Result<Graph, GraphError> {
    let seed = spec.seed;
    match &spec.family {
        Family::Gnp { n, p } => {
            let (n, p) = (*n, *p);
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::Spec(format!("gnp: p = {p} not in [0, 1]")));
            }
            let mut edges = Vec::new();
            for i in 0..n {
                // Sequential u64 reads of stream i visit words 2j, 2j+2, ...
                let mut rng = pair_stream(seed, i, i + 1);
                for j in i + 1..n {
                    let x = rng.next_u64();
                    if unit(x) < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, edges)
        }
        Family::Grid { rows, cols } => {
            let (r, c) = (*rows, *cols);
            let mut edges = Vec::new();
            for i in 0..r {
                for j in 0..c {
                    let v = i * c + j;
                    if j + 1 < c {
                        edges.push((v, v + 1));
                    }
                    if i + 1 < r {
                        edges.push((v, v + c));
                    }
                }
            }
            Graph::new(r * c, edges)
        }
        Family::Path { n } => Graph::new(*n, (1..*n).map(|v| (v - 1, v))),
        Family::Cycle { n } => {
            if *n < 3 {
                return Err(GraphError::Spec(format!("cycle needs n >= 3, got {n}")));
            }
            Graph::new(*n, (0..*n).map(|v| (v, (v + 1) % n)))
        }
        Family::Tree { n } => {
            let edges = (1..*n).map(|v| {
                let x = pair_stream(seed, v, 0).next_u64();
                ((x % v as u64) as usize, v)
            });
            Graph::new(*n, edges.collect::<Vec<_>>())
        }
        Family::Star { n } => Graph::new(*n, (1..*n).map(|v| (0, v))),
        Family::Complete { n } => {
            Graph::new(*n, (0..*n).flat_map(|u| (u + 1..*n).map(move |v| (u, v))).collect::<Vec<_>>())
        }
        Family::File { path } => load_graph(path),
    }
}
