//! Independent checkers for decompositions, carve logs, balanced colorings
//! and the MIS / coloring applications. Inputs are the serialized forms, so
//! results from any implementation can be judged. A failing check always
//! carries a concrete witness.

mod apps;
mod balance;
mod decomp;
mod faults;
mod report;
mod trace;

pub use apps::{all_pairs_distances, brute_force_maximal_sets, check_coloring, check_mis, parse_coloring, parse_mis};
pub use balance::{check_balance, check_balance_with, Side};
pub use decomp::{check_decomposition, parse_decomposition, weak_diameter, Bounds, DecompRecord, TreeLine};
pub use faults::{forge_potential_drop, forge_token_drop, forge_unfinished};
pub use report::{Check, CheckReport};
pub use trace::{check_carve_trace, parse_trace_params, TraceParams};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

impl FormatError {
    pub fn new(line: usize, msg: impl Into<String>) -> Self {
        FormatError { line, msg: msg.into() }
    }
}
