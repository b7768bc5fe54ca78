use graph_core::ceil_log2;

/// Where a cluster's same-level split bit comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitSource {
    /// Bit `lev + 1` (1-based, least significant first) of the cluster id.
    IdBits,
    /// A red/blue color assigned per level by an external coloring.
    BalancedColors,
}

impl BitSource {
    pub fn name(self) -> &'static str {
        match self {
            BitSource::IdBits => "id",
            BitSource::BalancedColors => "balanced",
        }
    }

    /// Transcript-tree branching factor per phase.
    pub fn branches(self) -> u32 {
        match self {
            BitSource::IdBits => 2,
            BitSource::BalancedColors => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CarveParams {
    /// Number of levels; a cluster at level `b` is finished.
    pub b: u32,
    /// `b + ⌈log2 n⌉`.
    pub l: u32,
    pub phases: u32,
    pub steps_per_phase: u32,
    pub bit_source: BitSource,
}

impl CarveParams {
    /// `L = b + ⌈log2 n⌉`, `2L` phases of `28L` steps.
    pub fn new(b: u32, n: usize, bit_source: BitSource) -> Self {
        assert!(b >= 1, "level count must be positive");
        let l = b + ceil_log2(n);
        CarveParams { b, l, phases: 2 * l, steps_per_phase: 28 * l, bit_source }
    }

    /// Accept iff `p · accept_denominator ≥ t`.
    pub fn accept_denominator(&self) -> u128 {
        self.steps_per_phase as u128
    }

    /// Tokens paid per killed node: half the steps per phase.
    pub fn kill_cost(&self) -> u128 {
        14 * self.l as u128
    }

    /// Upper bound on how often one node changes cluster.
    pub fn max_cluster_changes(&self) -> u64 {
        6 * self.l as u64 + 1
    }
}

/// Split bit of a cluster at its current level. `Uncolored` only occurs
/// with balanced colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mark {
    /// Id bit 0 or red: may eat same-level `One` clusters.
    Zero,
    /// Id bit 1 or blue.
    One,
    Uncolored,
}

impl Mark {
    pub fn bit(self) -> u32 {
        (self == Mark::One) as u32
    }

    /// Transcript branch taken when leaving the level at the end of phase `i`.
    pub fn branch(self, phase: u32, source: BitSource) -> u32 {
        let offset = match self {
            Mark::Zero => 0,
            Mark::One => 1,
            Mark::Uncolored => 2,
        };
        source.branches() * phase + offset
    }

    pub fn code(self, source: BitSource) -> &'static str {
        match (source, self) {
            (BitSource::IdBits, Mark::Zero) => "0",
            (BitSource::IdBits, Mark::One) => "1",
            (_, Mark::Zero) => "r",
            (_, Mark::One) => "b",
            (_, Mark::Uncolored) => "u",
        }
    }
}

/// `Φ_i(C) = 3i − 2·lev + bit`.
pub fn potential(phase: u32, level: u32, mark: Mark) -> i64 {
    3 * phase as i64 - 2 * level as i64 + mark.bit() as i64
}

/// Id bit `lev + 1` of a `b`-level cluster (0 once finished).
pub fn id_mark(cluster_id: u64, level: u32, b: u32) -> Mark {
    if level >= b || level >= 64 || (cluster_id >> level) & 1 == 0 {
        Mark::Zero
    } else {
        Mark::One
    }
}
