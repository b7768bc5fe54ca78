use std::collections::BTreeMap;

use crate::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every primitive runs as a message-passing program; bandwidth enforced.
    Faithful,
    /// Primitives run centrally; rounds are charged by cost formula.
    Logical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelConfig {
    /// Bits per edge per direction per round; `None` is LOCAL.
    pub bandwidth: Option<u32>,
    pub mode: Mode,
}

impl ModelConfig {
    pub fn new(bandwidth: Option<u32>, mode: Mode) -> Result<Self, SimError> {
        if bandwidth == Some(0) {
            return Err(SimError::Config("bandwidth must be at least 1 bit".into()));
        }
        Ok(ModelConfig { bandwidth, mode })
    }

    pub fn local(mode: Mode) -> Self {
        ModelConfig { bandwidth: None, mode }
    }

    pub fn congest(b: u32, mode: Mode) -> Self {
        ModelConfig::new(Some(b), mode).expect("bandwidth >= 1")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundMetrics {
    pub mode: Mode,
    pub rounds_total: u64,
    /// Rounds per phase label; sums to `rounds_total`.
    pub per_phase: BTreeMap<String, u64>,
    /// Largest message seen on any edge in any round (faithful runs only).
    pub max_edge_bits: usize,
    pub messages: u64,
}

impl RoundMetrics {
    pub fn new(mode: Mode) -> Self {
        RoundMetrics { mode, rounds_total: 0, per_phase: BTreeMap::new(), max_edge_bits: 0, messages: 0 }
    }

    /// Adds `rounds` under `label` with no mode check. Used by the engine and
    /// by [`RoundMetrics::absorb`].
    pub(crate) fn add_rounds(&mut self, rounds: u64, label: &str) {
        if rounds == 0 {
            return;
        }
        self.rounds_total += rounds;
        *self.per_phase.entry(label.to_string()).or_insert(0) += rounds;
    }

    /// Folds a sub-run into this ledger, booking all of its rounds under `label`.
    pub fn absorb(&mut self, other: &RoundMetrics, label: &str) {
        self.add_rounds(other.rounds_total, label);
        self.max_edge_bits = self.max_edge_bits.max(other.max_edge_bits);
        self.messages += other.messages;
    }

    /// Folds a sub-ledger in, keeping its labels under `prefix.`.
    pub fn merge_prefixed(&mut self, other: &RoundMetrics, prefix: &str) {
        for (label, &r) in &other.per_phase {
            self.add_rounds(r, &format!("{prefix}.{label}"));
        }
        self.max_edge_bits = self.max_edge_bits.max(other.max_edge_bits);
        self.messages += other.messages;
    }
}

/// Logical-mode round accounting: `rounds` more rounds under `label`.
pub fn charge(metrics: &RoundMetrics, rounds: u64, label: &str) -> Result<RoundMetrics, SimError> {
    if metrics.mode != Mode::Logical {
        return Err(SimError::ChargeInFaithful);
    }
    let mut out = metrics.clone();
    out.add_rounds(rounds, label);
    Ok(out)
}
