//! Graph representation shared by every other crate in the workspace.
//!
//! Node *indices* (`0..n`) route messages; node *identifiers* (see
//! [`IdAssignment`]) are what algorithms compare. Keeping the two apart lets
//! identifier-width experiments reuse one graph.

mod error;
mod generate;
mod graph;
mod ids;
mod io;

pub use error::GraphError;
pub use generate::{generate, Family, GraphSpec};
pub use graph::Graph;
pub use ids::{assign_ids, ceil_log2, default_id_bits, log_star, IdAssignment, IdScheme};
pub use io::{load_graph, load_ids, parse_graph, parse_ids, save_graph, save_ids, write_graph, write_ids};
