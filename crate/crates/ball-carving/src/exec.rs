//! Round-level realization of carving steps on a [`Session`].
//!
//! One step: a neighbor exchange of cluster views, a proposal message to
//! the chosen contact, a pipelined sum of proposal counts over the Steiner
//! trees of active clusters, a pipelined broadcast of each root's verdict,
//! and a notify message from contact to proposer. Faithful mode makes every
//! decision from received bits; logical mode computes the same proposals
//! centrally and charges the same round counts.

use congest_sim::{exchange_rounds, gamma_len, Bits, Outbox, Session};
use graph_core::ceil_log2;
use tree_aggregation::{pipelined_broadcast, pipelined_sum, plan_channels, RootedTree};

use crate::state::{choose_target, Proposal, Rule, Rules, Verdict, View};
use crate::{id_mark, BitSource, CarveError, CarveOutcome, CarveParams, CarveState, Mark};

/// Supplies colors for the balanced variant at each phase start.
pub trait ColorOracle {
    /// Marks for `targets` (from [`CarveState::color_targets`]), in order.
    fn colors(&mut self, sess: &mut Session<'_>, state: &CarveState<'_>, targets: &[usize])
        -> Result<Vec<Mark>, CarveError>;
}

fn level_width(rules: &Rules) -> u32 {
    ceil_log2(rules.b as usize + 1).max(1)
}

fn view_width(state: &CarveState<'_>) -> usize {
    let rules = &state.rules;
    let mark = if rules.source() == BitSource::BalancedColors { 2 } else { 0 };
    2 * state.ids().b() as usize + level_width(rules) as usize + 1 + mark
}

fn encode_view(state: &CarveState<'_>, v: usize) -> Bits {
    let rules = &state.rules;
    let view = state.view(state.cluster_index(v).expect("living node has a cluster"));
    let w = state.ids().b();
    let mut bits = Bits::new();
    bits.push_uint(state.ids().id(v), w);
    bits.push_uint(view.cluster_id, w);
    bits.push_uint(view.level as u64, level_width(rules));
    bits.push(view.stalling);
    if rules.source() == BitSource::BalancedColors {
        let code = match view.mark {
            Mark::Zero => 0,
            Mark::One => 1,
            Mark::Uncolored => 2,
        };
        bits.push_uint(code, 2);
    }
    bits
}

fn decode_view(state: &CarveState<'_>, bits: &Bits) -> (u64, View) {
    let rules = &state.rules;
    let w = state.ids().b();
    let mut r = bits.reader();
    let node_id = r.uint(w);
    let cluster_id = r.uint(w);
    let level = r.uint(level_width(rules)) as u32;
    let stalling = r.bit();
    let mark = match rules.rule {
        Rule::Fast(BitSource::BalancedColors) | Rule::Rg(BitSource::BalancedColors) => match r.uint(2) {
            0 => Mark::Zero,
            1 => Mark::One,
            _ => Mark::Uncolored,
        },
        Rule::Fast(BitSource::IdBits) => id_mark(cluster_id, level, rules.b),
        Rule::Rg(BitSource::IdBits) => id_mark(cluster_id, state.phase() - 1, rules.b),
    };
    (node_id, View { cluster_id, level, mark, stalling })
}

fn exchange_cost(state: &CarveState<'_>, bandwidth: Option<u32>) -> u64 {
    let traffic = (state.talkers() > 0).then(|| view_width(state));
    exchange_rounds(traffic, bandwidth)
}

/// Rounds of a step in which no cluster is active.
fn idle_cost(state: &CarveState<'_>, bandwidth: Option<u32>) -> u64 {
    exchange_cost(state, bandwidth) + 2 * exchange_rounds(None, bandwidth)
}

fn notify_len(depth: usize) -> usize {
    1 + gamma_len(depth as u64 + 1)
}

/// Proposals derived from an actual view exchange and proposal round.
/// Returns the proposals and the count each contact received.
fn faithful_proposals(sess: &mut Session<'_>, state: &CarveState<'_>) -> Result<(Vec<Proposal>, Vec<u64>), CarveError> {
    let g = state.graph();
    let n = g.n();
    let out: Outbox = (0..n)
        .map(|v| {
            if !state.is_alive(v) {
                return Vec::new();
            }
            let bits = encode_view(state, v);
            (0..g.degree(v)).map(|port| (port, bits.clone())).collect()
        })
        .collect();
    let inbox = sess.exchange("carve.exchange", out)?;
    let mut proposals = Vec::new();
    let mut out: Outbox = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| state.is_alive(v)) {
        let from = state.cluster_index(v).unwrap();
        let own = state.view(from);
        let heard: Vec<(usize, u64, View)> = inbox[v]
            .iter()
            .map(|(port, bits)| {
                let (id, view) = decode_view(state, bits);
                (*port, id, view)
            })
            .collect();
        let Some(pick) = choose_target(&own, heard.iter().map(|&(_, id, view)| (id, view))) else {
            continue;
        };
        let (port, _, view) = heard[pick];
        let contact = g.neighbors(v)[port];
        let to = state.cluster_index(contact).expect("contact is alive");
        assert_eq!(state.clusters()[to].cluster_id, view.cluster_id, "decoded cluster id");
        proposals.push(Proposal { node: v, from, to, contact });
        out[v].push((port, Bits::from_uint(1, 1)));
    }
    let inbox = sess.exchange("carve.propose", out)?;
    let received = inbox.iter().map(|msgs| msgs.len() as u64).collect();
    Ok((proposals, received))
}

/// Runs one step. Returns `false` without spending rounds when no cluster
/// is active.
pub(crate) fn run_step(sess: &mut Session<'_>, state: &mut CarveState<'_>) -> Result<bool, CarveError> {
    let active = state.active_clusters();
    if active.is_empty() {
        return Ok(false);
    }
    let bandwidth = sess.bandwidth();
    let (proposals, received) = if sess.is_faithful() {
        let (p, r) = faithful_proposals(sess, state)?;
        (p, Some(r))
    } else {
        sess.charge(exchange_cost(state, bandwidth), "carve.exchange")?;
        let p = state.propose_step();
        sess.charge(exchange_rounds(p.iter().map(|_| 1), bandwidth), "carve.propose")?;
        (p, None)
    };

    let n = state.graph().n();
    let mut slot = vec![usize::MAX; state.clusters().len()];
    for (t, &c) in active.iter().enumerate() {
        slot[c] = t;
    }
    let (verdicts, delivered) = {
        let trees: Vec<&RootedTree> = active.iter().map(|&c| &state.clusters()[c].steiner).collect();
        let plan = plan_channels(&trees, bandwidth)?;
        let mut counts: Vec<Vec<u64>> = trees.iter().map(|t| vec![0; t.len()]).collect();
        for pr in &proposals {
            let t = slot[pr.to];
            counts[t][trees[t].position(pr.contact).expect("contact is in its tree")] += 1;
        }
        if let Some(received) = &received {
            for (t, tree) in trees.iter().enumerate() {
                for (pos, &u) in tree.nodes().iter().enumerate() {
                    let own = state.cluster_index(u) == Some(active[t]);
                    assert_eq!(counts[t][pos], if own { received[u] } else { 0 }, "proposal count at node {u}");
                }
            }
        }
        let m = ceil_log2(n).max(1);
        let sums = pipelined_sum(sess, "carve.sum", &trees, &counts, m, &plan)?.per_tree;
        let sizes = if matches!(state.rules.rule, Rule::Rg(_)) {
            let flags: Vec<Vec<u64>> =
                trees.iter().map(|t| (0..t.len()).map(|pos| t.terminal_at(pos) as u64).collect()).collect();
            pipelined_sum(sess, "carve.size", &trees, &flags, 1, &plan)?.per_tree
        } else {
            vec![0; trees.len()]
        };
        let verdicts: Vec<Verdict> = active
            .iter()
            .enumerate()
            .map(|(t, &c)| {
                let p = sums[t] as u64;
                Verdict { cluster: c, proposals: p, accept: state.decide(c, p, sizes[t] as u64) }
            })
            .collect();
        let messages: Vec<u64> = verdicts.iter().map(|v| v.accept as u64).collect();
        let heard = pipelined_broadcast(sess, "carve.verdict", &trees, &messages, 1, &plan)?.per_tree;

        // Contact -> proposer: the verdict its tree delivered, and its depth.
        let delivered = if sess.is_faithful() {
            let g = state.graph();
            let mut out: Outbox = vec![Vec::new(); n];
            for pr in &proposals {
                let t = slot[pr.to];
                let pos = trees[t].position(pr.contact).unwrap();
                let mut bits = Bits::new();
                bits.push(heard[t][pos] == 1);
                bits.push_gamma(trees[t].depth_at(pos) as u64 + 1);
                out[pr.contact].push((g.port(pr.contact, pr.node).unwrap(), bits));
            }
            for msgs in &mut out {
                msgs.sort_by_key(|&(port, _)| port);
            }
            let inbox = sess.exchange("carve.notify", out)?;
            let mut delivered = Vec::with_capacity(proposals.len());
            for pr in &proposals {
                let port = g.port(pr.node, pr.contact).unwrap();
                let (_, bits) = inbox[pr.node].iter().find(|(p, _)| *p == port).expect("proposer is notified");
                let mut r = bits.reader();
                let accepted = r.bit();
                let depth = r.gamma() - 1;
                delivered.push((accepted, depth as usize));
            }
            Some(delivered)
        } else {
            let lens = proposals.iter().map(|pr| {
                let t = slot[pr.to];
                notify_len(trees[t].depth_of(pr.contact).unwrap())
            });
            sess.charge(exchange_rounds(lens, bandwidth), "carve.notify")?;
            None
        };
        (verdicts, delivered)
    };
    if let Some(delivered) = delivered {
        for (pr, &(accepted, depth)) in proposals.iter().zip(&delivered) {
            assert_eq!(accepted, verdicts[slot[pr.to]].accept, "notified verdict for node {}", pr.node);
            assert_eq!(Some(depth), state.clusters()[pr.to].steiner.depth_of(pr.contact));
        }
    }
    state.apply(&proposals, &verdicts)?;
    Ok(true)
}

fn drive<'g>(
    sess: &mut Session<'g>,
    mut state: CarveState<'g>,
    mut oracle: Option<&mut dyn ColorOracle>,
) -> Result<CarveOutcome, CarveError> {
    let rules = state.rules;
    for i in 1..=rules.phases {
        let marks = if rules.source() == BitSource::BalancedColors {
            let targets = state.color_targets();
            let oracle = oracle.as_deref_mut().ok_or_else(|| CarveError::Coloring("balanced colors need an oracle".into()))?;
            // The phase number is not yet set; colorings read levels only.
            let marks = oracle.colors(sess, &state, &targets)?;
            if marks.len() != targets.len() {
                return Err(CarveError::Coloring(format!("{} colors for {} clusters", marks.len(), targets.len())));
            }
            Some(marks)
        } else {
            None
        };
        state.begin_phase(i, marks)?;
        for j in 1..=rules.steps {
            state.set_step(j);
            if !run_step(sess, &mut state)? {
                let idle = (rules.steps - j + 1) as u64 * idle_cost(&state, sess.bandwidth());
                sess.fast_forward(idle, "carve.idle");
                break;
            }
        }
        state.advance_phase()?;
    }
    state.check_final()?;
    Ok(state.finish())
}

/// Carves `S` on the session's network. Balanced colors require `oracle`.
pub fn carve_in(
    sess: &mut Session<'_>,
    s: &[usize],
    params: &CarveParams,
    oracle: Option<&mut dyn ColorOracle>,
) -> Result<CarveOutcome, CarveError> {
    let state = CarveState::new(sess.graph(), sess.ids(), s, Rules::fast(params))?;
    drive(sess, state, oracle)
}

/// The baseline carving: `b` phases on id bits, blue grows, red shrinks,
/// blue accepts iff `p·2b ≥ |C|`.
pub fn carve_rg_in(sess: &mut Session<'_>, s: &[usize]) -> Result<CarveOutcome, CarveError> {
    let g = sess.graph();
    let state = CarveState::new(g, sess.ids(), s, Rules::rg(sess.ids().b(), g.n(), BitSource::IdBits))?;
    drive(sess, state, None)
}

/// The baseline carving with `phases` phases whose red/blue split comes
/// from `oracle`, which colors every live cluster at each phase start.
pub fn carve_rg_balanced_in(
    sess: &mut Session<'_>,
    s: &[usize],
    phases: u32,
    oracle: &mut dyn ColorOracle,
) -> Result<CarveOutcome, CarveError> {
    let g = sess.graph();
    let state = CarveState::new(g, sess.ids(), s, Rules::rg(phases, g.n(), BitSource::BalancedColors))?;
    drive(sess, state, Some(oracle))
}
