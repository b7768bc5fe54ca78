//! Red/blue colorings in which neither color dominates.
//!
//! [`balanced_color_nodes`] colors every node of a graph without isolated
//! nodes so that each color has at most `⌊3|V|/4⌋` nodes, in a number of
//! rounds independent of `n`. [`balanced_color_clusters`] does the same for
//! clusters connected by network edges, per component of the cluster graph.
//! [`partial_color_levels`] grows each cluster of a level into a region by
//! breadth-first search and colors the resulting region graph, leaving
//! clusters with no region neighbor uncolored.
//!
//! All three reduce to a maximal independent set of a square graph of
//! degree at most 121, computed by [`linial_mis`].

mod clusters;
mod house;
mod levels;
mod mis;
mod net;
mod nodes;

use congest_sim::SimError;
use thiserror::Error;
use tree_aggregation::AggError;

pub use clusters::{balanced_color_clusters, ClusterColoring, ClusterScope};
pub use house::{attach, square, Attach, OutEdgeChoice, HEAVY_IN_DEGREE};
pub use levels::{bfs_radius, partial_color_levels, ExtendedCluster, LevelColoring, LevelScope};
pub use mis::{linial_mis, linial_palette, linial_params, linial_schedule, mis_announces, MisOutcome, LOG_STAR_SLOPE, VirtualNet, MAX_VIRTUAL_DEGREE};
pub use net::{book, ClusterCosts, ClusterNet, DirectNet, SquareNet};
pub use nodes::{balanced_color_nodes, NodeColoring};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
    Uncolored,
}

/// A coloring of a set of entities (nodes or clusters), indexed by entity.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RBColoring {
    pub colors: Vec<Color>,
}

impl RBColoring {
    pub fn count(&self, c: Color) -> usize {
        self.colors.iter().filter(|&&x| x == c).count()
    }

    /// Size of the larger color class.
    pub fn max_class(&self) -> usize {
        self.count(Color::Red).max(self.count(Color::Blue))
    }
}

/// Largest color class allowed among `k` colored entities.
pub fn balance_cap(k: usize) -> usize {
    3 * k / 4
}

#[derive(Debug, Error)]
pub enum ColorError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("virtual degree {degree} of entity {entity} exceeds the bound {bound}")]
    Degree { entity: usize, degree: usize, bound: usize },
    #[error("balance violated: {0}")]
    Balance(String),
    #[error(transparent)]
    Agg(#[from] AggError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
