use graph_core::{Graph, IdAssignment};

use crate::{gamma_len, run_protocol, Bits, Mode, ModelConfig, NodeCtx, NodeProgram, RoundMetrics, SimError, Status};

/// Per node: `(port, payload)` pairs to send.
pub type Outbox = Vec<Vec<(usize, Bits)>>;
/// Per node: `(port, payload)` pairs received, ascending by port.
pub type Inbox = Vec<Vec<(usize, Bits)>>;

const DEFAULT_MAX_ROUNDS: u64 = 1 << 48;

/// Rounds a fragmented neighbor exchange takes: each payload travels with an
/// Elias-gamma length header, cut into `B`-bit fragments. At least one round,
/// since silence is itself information.
pub fn exchange_rounds(payload_lens: impl IntoIterator<Item = usize>, bandwidth: Option<u32>) -> u64 {
    let Some(b) = bandwidth else { return 1 };
    payload_lens
        .into_iter()
        .map(|len| (gamma_len(len as u64 + 1) + len).div_ceil(b as usize) as u64)
        .max()
        .unwrap_or(0)
        .max(1)
}

/// Execution context shared by every distributed primitive: the network,
/// the model, and the round ledger accumulated so far.
pub struct Session<'g> {
    g: &'g Graph,
    ids: &'g IdAssignment,
    cfg: ModelConfig,
    metrics: RoundMetrics,
    max_rounds: u64,
}

impl<'g> Session<'g> {
    pub fn new(g: &'g Graph, ids: &'g IdAssignment, cfg: ModelConfig) -> Self {
        assert_eq!(g.n(), ids.len(), "identifier assignment does not match graph");
        Session { g, ids, cfg, metrics: RoundMetrics::new(cfg.mode), max_rounds: DEFAULT_MAX_ROUNDS }
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn ids(&self) -> &'g IdAssignment {
        self.ids
    }

    pub fn cfg(&self) -> ModelConfig {
        self.cfg
    }

    pub fn mode(&self) -> Mode {
        self.cfg.mode
    }

    pub fn is_faithful(&self) -> bool {
        self.cfg.mode == Mode::Faithful
    }

    pub fn bandwidth(&self) -> Option<u32> {
        self.cfg.bandwidth
    }

    pub fn metrics(&self) -> &RoundMetrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> RoundMetrics {
        self.metrics
    }

    /// Logical mode only.
    pub fn charge(&mut self, rounds: u64, label: &str) -> Result<(), SimError> {
        self.metrics = crate::charge(&self.metrics, rounds, label)?;
        Ok(())
    }

    /// Faithful charge-free bookkeeping for rounds that were simulated
    /// elsewhere (e.g. a sub-session).
    pub fn absorb(&mut self, other: &RoundMetrics, label: &str) {
        self.metrics.absorb(other, label);
    }

    /// Books `rounds` of a fixed schedule whose messages cannot change any
    /// node's state, without simulating them. Valid in both modes.
    pub fn fast_forward(&mut self, rounds: u64, label: &str) {
        self.metrics.add_rounds(rounds, label);
    }

    /// Runs a node program on the session's network and books its rounds.
    pub fn run<P: NodeProgram>(&mut self, label: &str, prog: &P) -> Result<Vec<P::Output>, SimError> {
        let out = run_protocol(self.g, self.ids, prog, &self.cfg, self.max_rounds)?;
        self.metrics.absorb(&out.metrics, label);
        Ok(out.outputs)
    }

    /// One logical neighbor exchange of arbitrary-length payloads. Faithful
    /// mode fragments every payload over `B`-bit rounds; logical mode
    /// delivers directly and charges [`exchange_rounds`].
    pub fn exchange(&mut self, label: &str, out: Outbox) -> Result<Inbox, SimError> {
        let n = self.g.n();
        assert_eq!(out.len(), n);
        if n == 0 {
            return Ok(Vec::new());
        }
        if self.is_faithful() {
            let prog = FragmentExchange { out, bandwidth: self.cfg.bandwidth };
            return self.run(label, &prog);
        }
        let rounds = exchange_rounds(out.iter().flatten().map(|(_, m)| m.len()), self.cfg.bandwidth);
        let mut inbox: Inbox = vec![Vec::new(); n];
        for (u, msgs) in out.into_iter().enumerate() {
            for (port, msg) in msgs {
                let v = self.g.neighbors(u)[port];
                let back = self.g.port(v, u).expect("symmetric adjacency");
                inbox[v].push((back, msg));
            }
        }
        for list in &mut inbox {
            list.sort_by_key(|&(p, _)| p);
        }
        self.charge(rounds, label)?;
        Ok(inbox)
    }
}

struct FragmentExchange {
    out: Outbox,
    bandwidth: Option<u32>,
}

struct FragState {
    /// Encoded outgoing payloads.
    out: Vec<(usize, Bits)>,
    frags_out: u64,
    /// Per sending port: bits received so far, and the decoded payload once complete.
    incoming: Vec<(usize, Bits, Option<Bits>)>,
}

fn try_decode(buf: &Bits) -> Option<Bits> {
    let zeros = buf.iter().position(|b| b)?;
    let header = 2 * zeros + 1;
    if buf.len() < header {
        return None;
    }
    let len = buf.slice(0, header).reader().gamma() as usize - 1;
    (buf.len() >= header + len).then(|| buf.slice(header, header + len))
}

impl FragmentExchange {
    fn frag_len(&self) -> Option<usize> {
        self.bandwidth.map(|b| b as usize)
    }
}

impl NodeProgram for FragmentExchange {
    type State = FragState;
    type Output = Vec<(usize, Bits)>;

    fn init(&self, ctx: &NodeCtx) -> FragState {
        let out: Vec<(usize, Bits)> = self.out[ctx.index]
            .iter()
            .map(|(p, msg)| {
                let mut enc = Bits::new();
                enc.push_gamma(msg.len() as u64 + 1);
                enc.extend(msg);
                (*p, enc)
            })
            .collect();
        let frags_out = match self.frag_len() {
            None => (!out.is_empty()) as u64,
            Some(f) => out.iter().map(|(_, e)| e.len().div_ceil(f) as u64).max().unwrap_or(0),
        };
        FragState { out, frags_out, incoming: Vec::new() }
    }

    fn send(&self, _ctx: &NodeCtx, round: u64, st: &FragState) -> Vec<(usize, Bits)> {
        let k = (round - 1) as usize;
        st.out
            .iter()
            .filter_map(|(p, enc)| {
                let (start, end) = match self.frag_len() {
                    None if k == 0 => (0, enc.len()),
                    None => return None,
                    Some(f) => (k * f, ((k + 1) * f).min(enc.len())),
                };
                (start < enc.len()).then(|| (*p, enc.slice(start, end)))
            })
            .collect()
    }

    fn receive(&self, _ctx: &NodeCtx, round: u64, st: &mut FragState, inbox: &[(usize, Bits)]) -> Status {
        for (p, frag) in inbox {
            if round == 1 {
                st.incoming.push((*p, Bits::new(), None));
            }
            let slot = st.incoming.iter_mut().find(|(q, _, _)| q == p).expect("fragment from a silent port");
            slot.1.extend(frag);
            slot.2 = try_decode(&slot.1);
        }
        let receiving = st.incoming.iter().any(|(_, _, done)| done.is_none());
        if round >= st.frags_out && !receiving {
            Status::Halted
        } else {
            Status::Running
        }
    }

    fn output(&self, _ctx: &NodeCtx, st: FragState) -> Vec<(usize, Bits)> {
        st.incoming.into_iter().map(|(p, _, m)| (p, m.expect("complete payload"))).collect()
    }
}
