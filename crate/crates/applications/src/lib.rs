//! Maximal independent set and (Δ+1)-coloring on top of a network
//! decomposition.
//!
//! Color classes are processed in order. Inside a class every cluster
//! gathers its still-undecided members, their mutual edges and what they
//! heard from earlier classes at the root of its Steiner tree, solves the
//! sequential greedy there in ascending identifier order, and streams the
//! answers back down. Clusters of one color are non-adjacent, so answers
//! computed in parallel never conflict. Decided nodes then tell their
//! neighbors, which is all a later class needs to know.
//!
//! Both modes run the same schedule: tree operations and neighbor exchanges
//! are simulated message by message in faithful mode and charged by formula
//! in logical mode, so results and round counts agree.

mod driver;

use congest_sim::{ModelConfig, RoundMetrics, SimError};
use decomposition::Decomposition;
use graph_core::{Graph, IdAssignment};
use thiserror::Error;
use tree_aggregation::AggError;

use driver::Task;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("decomposition rejected: {0}")]
    Invalid(String),
    #[error("Δ = {delta} is below the maximum degree {max_degree}")]
    Delta { delta: usize, max_degree: usize },
    #[error("input mismatch: {0}")]
    Shape(String),
    #[error("node {node} has no free color left")]
    Infeasible { node: usize },
    #[error(transparent)]
    Agg(#[from] AggError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Clone, Debug)]
pub struct MisResult {
    /// Node → membership.
    pub selected: Vec<bool>,
    pub rounds: u64,
    pub metrics: RoundMetrics,
}

impl MisResult {
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter().enumerate().filter(|(_, &s)| s).map(|(v, _)| v)
    }

    pub fn size(&self) -> usize {
        self.nodes().count()
    }

    pub fn to_text(&self) -> String {
        mis_to_text(&self.selected)
    }
}

#[derive(Clone, Debug)]
pub struct ColoringResult {
    /// Node → color in `1..=delta + 1`.
    pub colors: Vec<u32>,
    pub delta: usize,
    pub rounds: u64,
    pub metrics: RoundMetrics,
}

impl ColoringResult {
    pub fn colors_used(&self) -> usize {
        let mut seen: Vec<u32> = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn to_text(&self) -> String {
        coloring_to_text(&self.colors)
    }
}

/// Greedy MIS per color class: a node joins unless an earlier class or an
/// earlier node of its own cluster already dominates it.
pub fn mis_via_decomposition(
    g: &Graph,
    ids: &IdAssignment,
    d: &Decomposition,
    cfg: ModelConfig,
) -> Result<MisResult, AppError> {
    let out = driver::run(g, ids, d, cfg, Task::Mis)?;
    let selected = out.answers.iter().map(|&a| a == 1).collect();
    Ok(MisResult { selected, rounds: out.metrics.rounds_total, metrics: out.metrics })
}

/// Greedy list coloring per color class with lists `{1..=Δ+1}` minus the
/// colors neighbors fixed earlier. A node has at most `Δ` colored neighbors,
/// so its list never runs empty.
pub fn coloring_via_decomposition(
    g: &Graph,
    ids: &IdAssignment,
    d: &Decomposition,
    delta: usize,
    cfg: ModelConfig,
) -> Result<ColoringResult, AppError> {
    if delta < g.max_degree() {
        return Err(AppError::Delta { delta, max_degree: g.max_degree() });
    }
    let out = driver::run(g, ids, d, cfg, Task::Coloring { delta })?;
    let colors = out.answers.iter().map(|&a| a as u32).collect();
    Ok(ColoringResult { colors, delta, rounds: out.metrics.rounds_total, metrics: out.metrics })
}

/// One `m <node>` line per selected node, ascending.
pub fn mis_to_text(selected: &[bool]) -> String {
    selected.iter().enumerate().filter(|(_, &s)| s).map(|(v, _)| format!("m {v}\n")).collect()
}

/// One `col <node> <color>` line per node, ascending.
pub fn coloring_to_text(colors: &[u32]) -> String {
    colors.iter().enumerate().map(|(v, c)| format!("col {v} {c}\n")).collect()
}
