use congest_sim::ModelConfig;
use decomposition::decompose;
use graph_core::{assign_ids, ceil_log2, generate, GraphSpec, IdScheme};
use rayon::prelude::*;
use serde::Serialize;

use crate::setup::model;
use crate::{write_file, BenchArgs, CliError, Outcome};

pub const CSV_HEADER: [&str; 12] = [
    "algo", "n", "m", "seed", "id_bits", "colors", "clusters", "kills", "max_tree_depth", "max_overlap",
    "max_weak_diameter", "rounds",
];

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BenchRow {
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub id_bits: u32,
    pub colors: u32,
    pub clusters: usize,
    pub kills: usize,
    pub max_tree_depth: usize,
    pub max_overlap: usize,
    pub max_weak_diameter: u64,
    pub rounds: u64,
}

fn list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| CliError::Usage(format!("{flag}: `{x}` is not a number"))))
        .collect()
}

struct Job {
    n: usize,
    seed: u64,
    bits: Option<u32>,
}

fn one(a: &BenchArgs, cfg: ModelConfig, job: &Job) -> Result<BenchRow, CliError> {
    let variant = a
        .algo
        .variant()
        .ok_or_else(|| CliError::Usage(format!("bench sweeps decompositions, not `{}`", a.algo.name())))?;
    let p = (a.avg_degree / (job.n.max(2) - 1) as f64).min(1.0);
    let spec = a.family.replace("{n}", &job.n.to_string()).replace("{p}", &format!("{p:.6}"));
    let g = generate(&GraphSpec::parse(&spec, job.seed).map_err(|e| CliError::Usage(e.to_string()))?)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let b = job.bits.unwrap_or_else(|| ceil_log2(g.n()).max(1));
    let ids = assign_ids(&g, b, IdScheme::Sequential).map_err(|e| CliError::Usage(e.to_string()))?;
    let d = decompose(&g, &ids, cfg, variant).map_err(CliError::algorithm)?;
    let rec = verify::parse_decomposition(&d.to_text()).map_err(|e| CliError::Format(e.to_string()))?;
    let report = verify::check_decomposition(&g, &rec, &verify::Bounds::none());
    Ok(BenchRow {
        algo: a.algo.name().into(),
        n: g.n(),
        m: g.m(),
        seed: job.seed,
        id_bits: b,
        colors: d.colors(),
        clusters: d.clusters.len(),
        kills: d.kills(),
        max_tree_depth: d.max_tree_depth(),
        max_overlap: d.max_overlap(),
        max_weak_diameter: report.measured("max_weak_diameter").and_then(|w| w.parse().ok()).unwrap_or(0),
        rounds: d.metrics.rounds_total,
    })
}

/// Every (size, seed, width) configuration of the grid, in grid order.
/// Configurations run in parallel and independently.
pub fn sweep(a: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let cfg = model(a.mode, &a.bandwidth)?;
    let sizes: Vec<usize> = list(&a.sizes, "--sizes")?;
    let seeds: Vec<u64> = list(&a.seeds, "--seeds")?;
    let widths: Vec<Option<u32>> = match &a.id_bits {
        Some(s) => list(s, "--id-bits")?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut jobs = Vec::new();
    for &n in &sizes {
        for &seed in &seeds {
            for &bits in &widths {
                jobs.push(Job { n, seed, bits });
            }
        }
    }
    jobs.par_iter().map(|j| one(a, cfg, j)).collect()
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Least-squares slope of `ln rounds` against `ln ln n`: rounds grow like
/// `(ln n)^k`. `None` with fewer than two distinct sizes.
pub fn fitted_exponent(rows: &[BenchRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 3 && r.rounds > 0)
        .map(|r| ((r.n as f64).ln().ln(), (r.rounds as f64).ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 1e-12).then(|| sxy / sxx)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Outcome, CliError> {
    let rows = sweep(a)?;
    let csv = to_csv(&rows);
    let k = fitted_exponent(&rows);
    let summary = serde_json::json!({ "rows": rows.len(), "fitted_exponent": k });
    let out = match &a.out {
        Some(path) => {
            write_file(path, &csv)?;
            Outcome { stdout: format!("{summary}\n"), stderr: String::new(), passed: true }
        }
        None => Outcome { stdout: csv, stderr: format!("{summary}\n"), passed: true },
    };
    Ok(out)
}
