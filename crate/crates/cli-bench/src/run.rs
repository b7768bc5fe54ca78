use std::collections::BTreeMap;
use std::time::Instant;

use applications::{coloring_via_decomposition, mis_via_decomposition};
use balanced_coloring::{balanced_color_nodes, Color};
use congest_sim::{Mode, Session};
use decomposition::{decompose, Decomposition};
use graph_core::Graph;
use serde::Serialize;
use serde_json::{json, Value};
use verify::{check_balance_with, check_carve_trace, check_coloring, check_decomposition, check_mis, Bounds, CheckReport, Side};

use crate::{load_network, write_file, Algo, CliError, Network, Outcome, RunArgs};

/// Everything needed to reproduce a run, and what it measured. Keys keep
/// their order; `stats` is sorted by key.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunRecord {
    pub algo: String,
    pub graph: String,
    pub seed: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub mode: String,
    pub bandwidth: Option<u32>,
    pub id_bits: u32,
    pub id_scheme: String,
    pub stats: BTreeMap<String, Value>,
    pub rounds: u64,
    pub checks: Option<CheckSummary>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckSummary {
    pub status: String,
    /// Failed check → witness.
    pub failures: BTreeMap<String, String>,
    pub measures: BTreeMap<String, String>,
}

impl CheckSummary {
    fn of(r: &CheckReport) -> Self {
        CheckSummary {
            status: if r.ok() { "pass" } else { "fail" }.into(),
            failures: r.failures().map(|c| (c.name.clone(), c.witness.clone().unwrap_or_default())).collect(),
            measures: r.measures.iter().cloned().collect(),
        }
    }
}

/// Structure and quality of a decomposition plus every carve log.
pub fn check_decomposition_full(g: &Graph, d: &Decomposition) -> Result<CheckReport, CliError> {
    let rec = verify::parse_decomposition(&d.to_text()).map_err(|e| CliError::Format(e.to_string()))?;
    let mut report = check_decomposition(g, &rec, &Bounds::for_record(&rec));
    for c in &d.carves {
        report.merge("trace.", check_carve_trace(c.trace.as_str()));
    }
    Ok(report)
}

fn decomposition_stats(d: &Decomposition, stats: &mut BTreeMap<String, Value>) {
    stats.insert("variant".into(), json!(d.variant.name()));
    stats.insert("colors".into(), json!(d.colors()));
    stats.insert("clusters".into(), json!(d.clusters.len()));
    stats.insert("kills".into(), json!(d.kills()));
    stats.insert("carves".into(), json!(d.carves.len()));
    stats.insert("max_tree_depth".into(), json!(d.max_tree_depth()));
    stats.insert("max_overlap".into(), json!(d.max_overlap()));
    stats.insert("param_b".into(), json!(d.params.b));
    stats.insert("param_l".into(), json!(d.params.l));
    stats.insert("phases".into(), json!(d.params.phases));
    stats.insert("steps".into(), json!(d.params.steps));
    stats.insert("decomposition_rounds".into(), json!(d.metrics.rounds_total));
}

fn traces(d: &Decomposition) -> String {
    d.carves.iter().map(|c| c.trace.as_str()).collect()
}

fn side(c: Color) -> Side {
    match c {
        Color::Red => Side::Red,
        Color::Blue => Side::Blue,
        Color::Uncolored => Side::Uncolored,
    }
}

pub fn cmd_run(a: &RunArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let Network { g, ids, cfg } = load_network(&a.net)?;
    let mut stats = BTreeMap::new();
    let mut report: Option<CheckReport> = None;
    let (text, trace, rounds) = match a.algo {
        Algo::BalancedColor => {
            if a.trace.is_some() {
                return Err(CliError::Usage("balanced-color writes no carve traces".into()));
            }
            let mut sess = Session::new(&g, &ids, cfg);
            let out = balanced_color_nodes(&mut sess).map_err(CliError::algorithm)?;
            let sides: Vec<Side> = out.coloring.colors.iter().map(|&c| side(c)).collect();
            stats.insert("red".into(), json!(out.coloring.count(Color::Red)));
            stats.insert("blue".into(), json!(out.coloring.count(Color::Blue)));
            stats.insert("max_class".into(), json!(out.coloring.max_class()));
            stats.insert("cap".into(), json!(3 * g.n() / 4));
            if a.check {
                report = Some(check_balance_with(&sides, None, |k| 3 * k / 4));
            }
            let text: String = sides
                .iter()
                .enumerate()
                .map(|(v, s)| format!("bc {v} {}\n", if *s == Side::Red { 'r' } else { 'b' }))
                .collect();
            (text, None, out.rounds)
        }
        algo => {
            let variant = algo.variant().or(a.via.variant()).ok_or_else(|| {
                CliError::Usage(format!("--via must name a decomposition, got `{}`", a.via.name()))
            })?;
            let d = decompose(&g, &ids, cfg, variant).map_err(CliError::algorithm)?;
            decomposition_stats(&d, &mut stats);
            let mut r = if a.check { Some(check_decomposition_full(&g, &d)?) } else { None };
            let (text, rounds) = match algo {
                Algo::Mis => {
                    let out = mis_via_decomposition(&g, &ids, &d, cfg).map_err(CliError::algorithm)?;
                    stats.insert("mis_size".into(), json!(out.size()));
                    if let Some(r) = r.as_mut() {
                        r.merge("mis.", check_mis(&g, &out.selected));
                    }
                    (out.to_text(), out.rounds)
                }
                Algo::Coloring => {
                    let delta = a.delta.unwrap_or_else(|| g.max_degree());
                    let out = coloring_via_decomposition(&g, &ids, &d, delta, cfg).map_err(CliError::algorithm)?;
                    stats.insert("delta".into(), json!(delta));
                    stats.insert("colors_used".into(), json!(out.colors_used()));
                    if let Some(r) = r.as_mut() {
                        r.merge("coloring.", check_coloring(&g, &out.colors, delta as u32 + 1));
                    }
                    (out.to_text(), out.rounds)
                }
                _ => (d.to_text(), d.metrics.rounds_total),
            };
            if let Some(w) = r.as_ref().and_then(|r| r.measured("max_weak_diameter")) {
                stats.insert("max_weak_diameter".into(), json!(w.parse::<u64>().unwrap_or(0)));
            }
            report = r;
            (text, Some(traces(&d)), rounds)
        }
    };
    if let Some(path) = &a.out {
        write_file(path, &text)?;
    }
    if let (Some(path), Some(t)) = (&a.trace, &trace) {
        write_file(path, t)?;
    }
    let record = RunRecord {
        algo: a.algo.name().into(),
        graph: a.net.graph.graph.clone(),
        seed: a.net.graph.seed,
        n: g.n(),
        m: g.m(),
        mode: match cfg.mode {
            Mode::Logical => "logical",
            Mode::Faithful => "faithful",
        }
        .into(),
        bandwidth: cfg.bandwidth,
        id_bits: ids.b(),
        id_scheme: format!("{:?}", a.net.id_scheme).to_lowercase(),
        stats,
        rounds,
        checks: report.as_ref().map(CheckSummary::of),
        wall_ms: start.elapsed().as_millis() as u64,
    };
    let line = serde_json::to_string(&record).expect("records serialize");
    Ok(Outcome { stdout: line + "\n", stderr: String::new(), passed: report.map_or(true, |r| r.ok()) })
}
