use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Graph, GraphError};

/// `⌈log2 x⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        usize::BITS - (x - 1).leading_zeros()
    }
}

/// Iterated logarithm: how many times `log2` must be applied to `x` before
/// the value drops to at most 1.
pub fn log_star(x: u64) -> u32 {
    let mut v = x as f64;
    let mut k = 0;
    while v > 1.0 {
        v = v.log2();
        k += 1;
    }
    k
}

/// Default identifier width for an `n`-node graph: `max(1, ⌈log2 n⌉)`.
pub fn default_id_bits(n: usize) -> u32 {
    ceil_log2(n).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdScheme {
    /// `id(v) = v`.
    Sequential,
    /// A seeded permutation of `0..n`.
    Shuffled(u64),
    /// `id(v) = v`, declared at the (larger) width `b`.
    Padded,
}

/// Unique `b`-bit identifiers, one per node index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdAssignment {
    b: u32,
    ids: Vec<u64>,
}

impl IdAssignment {
    /// Validates width (`1..=64`, `2^b ≥ n`), range and uniqueness.
    pub fn new(b: u32, ids: Vec<u64>) -> Result<Self, GraphError> {
        if b == 0 || b > 64 {
            return Err(GraphError::Ids(format!("width {b} outside 1..=64")));
        }
        if b < 64 && (ids.len() as u128) > (1u128 << b) {
            return Err(GraphError::Ids(format!("2^{b} < n = {}", ids.len())));
        }
        if let Some(&bad) = ids.iter().find(|&&x| b < 64 && x >> b != 0) {
            return Err(GraphError::Ids(format!("identifier {bad} does not fit {b} bits")));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::Ids(format!("identifier {} used twice", w[0])));
        }
        Ok(IdAssignment { b, ids })
    }

    pub fn sequential(n: usize) -> Self {
        IdAssignment { b: default_id_bits(n), ids: (0..n as u64).collect() }
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn id(&self, v: usize) -> u64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Same identifiers declared at a different width.
    pub fn with_width(&self, b: u32) -> Result<Self, GraphError> {
        IdAssignment::new(b, self.ids.clone())
    }
}

pub fn assign_ids(g: &Graph, b: u32, scheme: IdScheme) -> Result<IdAssignment, GraphError> {
    let n = g.n();
    let ids = match scheme {
        IdScheme::Sequential | IdScheme::Padded => (0..n as u64).collect(),
        IdScheme::Shuffled(seed) => {
            let mut ids: Vec<u64> = (0..n as u64).collect();
            ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            ids
        }
    };
    IdAssignment::new(b, ids)
}
