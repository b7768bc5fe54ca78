use std::collections::VecDeque;

use congest_sim::{Bits, Session};
use graph_core::ceil_log2;

use crate::schedule::{memberships, pass_rounds, Chunking, Kernel, TreeProgram};
use crate::{AggError, ChannelPlan, RootedTree};

/// Declared slope constant of the round bound `r + ⌈m/b'⌉·C_S + C_0`.
pub const C_S: u64 = 2;
/// Declared additive constant of the round bound.
pub const C_0: u64 = 2;

/// `⌈m/b'⌉`, with an unbounded `b'` moving any nonempty payload in one chunk.
pub fn chunks(m: usize, per_tree: Option<u32>) -> u64 {
    Chunking::new(m, per_tree).count()
}

/// The declared bound `r + ⌈m/b'⌉·C_S + C_0`.
pub fn round_bound(r: usize, m: usize, per_tree: Option<u32>) -> u64 {
    r as u64 + chunks(m, per_tree) * C_S + C_0
}

/// Summation width `M = m + ⌈log2 size⌉ + 1`; sums of `size` values below
/// `2^m` are exact modulo `2^M`.
pub fn sum_width(m: u32, max_tree_size: usize) -> usize {
    m as usize + ceil_log2(max_tree_size) as usize + 1
}

pub fn sum_rounds(r: usize, m: u32, max_tree_size: usize, per_tree: Option<u32>) -> u64 {
    pass_rounds(r, chunks(sum_width(m, max_tree_size), per_tree))
}

pub fn min_rounds(r: usize, m: u32, per_tree: Option<u32>) -> u64 {
    pass_rounds(r, chunks(m as usize, per_tree))
}

pub fn broadcast_rounds(r: usize, m: u32, per_tree: Option<u32>) -> u64 {
    pass_rounds(r, chunks(m as usize, per_tree))
}

/// Each convergecast slot is a flag bit (0 item, 1 end) and `m` payload bits.
pub fn convergecast_rounds(r: usize, m: u32, cap: usize, per_tree: Option<u32>) -> u64 {
    pass_rounds(r, chunks(cap * (m as usize + 1), per_tree))
}

/// Per-tree results of one operation and the rounds it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregate<T> {
    pub per_tree: Vec<T>,
    pub rounds: u64,
}

fn max_depth(trees: &[&RootedTree]) -> usize {
    trees.iter().map(|t| t.depth()).max().unwrap_or(0)
}

fn check_shape<T>(trees: &[&RootedTree], plan: &ChannelPlan, per_node: &[Vec<T>]) -> Result<(), AggError> {
    if plan.trees != trees.len() {
        return Err(AggError::Input(format!("plan covers {} trees, got {}", plan.trees, trees.len())));
    }
    if per_node.len() != trees.len() {
        return Err(AggError::Input(format!("{} value lists for {} trees", per_node.len(), trees.len())));
    }
    for (t, (tree, vals)) in trees.iter().zip(per_node).enumerate() {
        if vals.len() != tree.len() {
            return Err(AggError::Input(format!("tree {t}: {} values for {} nodes", vals.len(), tree.len())));
        }
    }
    Ok(())
}

fn check_width(t: usize, pos: usize, value: u64, m: u32) -> Result<(), AggError> {
    if m < 64 && value >> m != 0 {
        return Err(AggError::ValueTooLarge { tree: t, pos, value, m });
    }
    Ok(())
}

fn mask(w: usize) -> u128 {
    if w >= 128 {
        u128::MAX
    } else {
        (1u128 << w) - 1
    }
}

fn push_wide(bits: &mut Bits, value: u128, width: usize) {
    if width > 64 {
        bits.push_uint((value >> 64) as u64, (width - 64) as u32);
        bits.push_uint(value as u64, 64);
    } else {
        bits.push_uint(value as u64, width as u32);
    }
}

fn read_wide(bits: &Bits) -> u128 {
    bits.iter().fold(0u128, |acc, b| acc << 1 | b as u128)
}

/// Runs `kernel` faithfully, or charges its rounds in logical mode. Returns
/// the faithful per-(tree, pos) outputs, or `None` in logical mode.
fn execute<K: Kernel>(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    kernel: &K,
    rounds: u64,
) -> Result<Option<Vec<Vec<Option<K::Out>>>>, AggError> {
    if !sess.is_faithful() {
        sess.charge(rounds, label)?;
        return Ok(None);
    }
    if rounds == 0 {
        return Ok(None);
    }
    let members = memberships(sess.graph(), trees)?;
    let prog = TreeProgram { kernel, members: &members, total_rounds: rounds };
    let before = sess.metrics().rounds_total;
    let outputs = sess.run(label, &prog)?;
    assert_eq!(sess.metrics().rounds_total - before, rounds, "schedule length disagrees with its formula");
    let mut per: Vec<Vec<Option<K::Out>>> = trees.iter().map(|t| (0..t.len()).map(|_| None).collect()).collect();
    for list in outputs {
        for (t, pos, out) in list {
            per[t][pos] = Some(out);
        }
    }
    Ok(Some(per))
}

struct SumKernel<'a> {
    r: usize,
    chunking: Chunking,
    values: &'a [Vec<u64>],
}

impl Kernel for SumKernel<'_> {
    type Local = u128;
    type Out = u128;

    fn upward(&self) -> bool {
        true
    }

    fn init(&self, tree: usize, pos: usize, _depth: usize, _children: usize) -> u128 {
        self.values[tree][pos] as u128
    }

    fn width(&self, depth: usize, round: u64) -> usize {
        self.chunking.width_of(round as i64 - (self.r as i64 - depth as i64))
    }

    fn take(&self, depth: usize, round: u64, residual: &mut u128, _c: usize, bits: Bits) {
        let k = (round as i64 - (self.r as i64 - depth as i64 - 1)) as u64;
        let (start, _) = self.chunking.bounds(k);
        *residual = residual.wrapping_add(read_wide(&bits) << start);
    }

    fn advance(&self, depth: usize, round: u64, residual: &mut u128) -> Option<Bits> {
        let k = round as i64 + 1 - (self.r as i64 - depth as i64);
        if depth == 0 || self.chunking.width_of(k) == 0 {
            return None;
        }
        let (start, end) = self.chunking.bounds(k as u64);
        let chunk = (*residual >> start) & mask(end - start);
        *residual -= chunk << start;
        // After chunk k leaves, the low `end` bits of the residual are zero.
        assert_eq!(*residual & mask(end), 0, "summation residual not cleared below bit {end}");
        let mut bits = Bits::new();
        push_wide(&mut bits, chunk, end - start);
        Some(bits)
    }

    fn finish(&self, depth: usize, residual: u128) -> u128 {
        if depth > 0 {
            assert_eq!(residual & mask(self.chunking.total), 0, "non-root residual left after the last chunk");
        }
        residual & mask(self.chunking.total)
    }
}

/// Each root learns the sum of its tree's values modulo `2^M`
/// (see [`sum_width`]). Values are per tree, indexed by tree position.
pub fn pipelined_sum(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    values: &[Vec<u64>],
    m: u32,
    plan: &ChannelPlan,
) -> Result<Aggregate<u128>, AggError> {
    check_shape(trees, plan, values)?;
    for (t, vals) in values.iter().enumerate() {
        for (pos, &x) in vals.iter().enumerate() {
            check_width(t, pos, x, m)?;
        }
    }
    let r = max_depth(trees);
    let size = trees.iter().map(|t| t.len()).max().unwrap_or(1);
    let width = sum_width(m, size);
    let kernel = SumKernel { r, chunking: Chunking::new(width, plan.per_tree), values };
    let rounds = sum_rounds(r, m, size, plan.per_tree);
    let per_tree = match execute(sess, label, trees, &kernel, rounds)? {
        Some(out) => out.into_iter().map(|mut t| t[0].take().expect("root output")).collect(),
        None => values.iter().map(|v| v.iter().map(|&x| x as u128).sum::<u128>() & mask(width)).collect(),
    };
    Ok(Aggregate { per_tree, rounds })
}

struct MinKernel<'a> {
    r: usize,
    m: usize,
    chunking: Chunking,
    values: &'a [Vec<u64>],
}

struct MinLocal {
    own: u64,
    /// Survivors: slot 0 is the node's own value, slot `c + 1` child `c`.
    alive: Vec<bool>,
    child_chunk: Vec<u64>,
    prefix: u64,
}

impl MinKernel<'_> {
    /// Chunk `k` of an `m`-bit value, most significant chunk first.
    fn chunk_of(&self, value: u64, k: u64) -> u64 {
        let (start, end) = self.chunking.bounds(k);
        ((value as u128 >> (self.m - end)) & mask(end - start)) as u64
    }
}

impl Kernel for MinKernel<'_> {
    type Local = MinLocal;
    type Out = u64;

    fn upward(&self) -> bool {
        true
    }

    fn init(&self, tree: usize, pos: usize, _depth: usize, children: usize) -> MinLocal {
        MinLocal {
            own: self.values[tree][pos],
            alive: vec![true; children + 1],
            child_chunk: vec![0; children],
            prefix: 0,
        }
    }

    fn width(&self, depth: usize, round: u64) -> usize {
        self.chunking.width_of(round as i64 - (self.r as i64 - depth as i64))
    }

    fn take(&self, _depth: usize, _round: u64, st: &mut MinLocal, c: usize, bits: Bits) {
        st.child_chunk[c] = read_wide(&bits) as u64;
    }

    fn advance(&self, depth: usize, round: u64, st: &mut MinLocal) -> Option<Bits> {
        let k = round as i64 + 1 - (self.r as i64 - depth as i64);
        let w = self.chunking.width_of(k);
        if w == 0 {
            return None;
        }
        let candidate = |s: usize| if s == 0 { self.chunk_of(st.own, k as u64) } else { st.child_chunk[s - 1] };
        let best = (0..st.alive.len()).filter(|&s| st.alive[s]).map(candidate).min().expect("own value survives");
        for s in 0..st.alive.len() {
            if st.alive[s] && candidate(s) != best {
                st.alive[s] = false;
            }
        }
        st.prefix = ((st.prefix as u128) << w | best as u128) as u64;
        (depth > 0).then(|| Bits::from_uint(best, w as u32))
    }

    fn finish(&self, _depth: usize, st: MinLocal) -> u64 {
        st.prefix
    }
}

/// Each root learns the exact minimum of its tree's `m`-bit values.
pub fn pipelined_min(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    values: &[Vec<u64>],
    m: u32,
    plan: &ChannelPlan,
) -> Result<Aggregate<u64>, AggError> {
    check_shape(trees, plan, values)?;
    for (t, vals) in values.iter().enumerate() {
        for (pos, &x) in vals.iter().enumerate() {
            check_width(t, pos, x, m)?;
        }
    }
    let r = max_depth(trees);
    let kernel = MinKernel { r, m: m as usize, chunking: Chunking::new(m as usize, plan.per_tree), values };
    let rounds = min_rounds(r, m, plan.per_tree);
    let per_tree = match execute(sess, label, trees, &kernel, rounds)? {
        Some(out) => out.into_iter().map(|mut o| o[0].take().expect("root output")).collect(),
        None => values.iter().map(|v| *v.iter().min().expect("trees are nonempty")).collect(),
    };
    Ok(Aggregate { per_tree, rounds })
}

struct BroadcastKernel<'a> {
    chunking: Chunking,
    messages: &'a [u64],
}

struct BroadcastLocal {
    value: u64,
    has_children: bool,
}

impl Kernel for BroadcastKernel<'_> {
    type Local = BroadcastLocal;
    type Out = u64;

    fn upward(&self) -> bool {
        false
    }

    fn init(&self, tree: usize, _pos: usize, depth: usize, children: usize) -> BroadcastLocal {
        BroadcastLocal { value: if depth == 0 { self.messages[tree] } else { 0 }, has_children: children > 0 }
    }

    fn width(&self, depth: usize, round: u64) -> usize {
        self.chunking.width_of(round as i64 - depth as i64)
    }

    fn take(&self, _depth: usize, _round: u64, st: &mut BroadcastLocal, _c: usize, bits: Bits) {
        st.value = ((st.value as u128) << bits.len() | read_wide(&bits)) as u64;
    }

    fn advance(&self, depth: usize, round: u64, st: &mut BroadcastLocal) -> Option<Bits> {
        let k = round as i64 + 1 - depth as i64;
        let w = self.chunking.width_of(k);
        if w == 0 || !st.has_children {
            return None;
        }
        let (start, end) = self.chunking.bounds(k as u64);
        let chunk = if depth == 0 {
            (st.value as u128 >> (self.chunking.total - end)) & mask(end - start)
        } else {
            // Chunk k arrived last round and sits in the low bits.
            st.value as u128 & mask(w)
        };
        Some(Bits::from_uint(chunk as u64, w as u32))
    }

    fn finish(&self, _depth: usize, st: BroadcastLocal) -> u64 {
        st.value
    }
}

/// Every tree node learns its root's `m`-bit message; the result is indexed
/// by tree position.
pub fn pipelined_broadcast(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    messages: &[u64],
    m: u32,
    plan: &ChannelPlan,
) -> Result<Aggregate<Vec<u64>>, AggError> {
    let shaped: Vec<Vec<()>> = trees.iter().map(|t| vec![(); t.len()]).collect();
    check_shape(trees, plan, &shaped)?;
    if messages.len() != trees.len() {
        return Err(AggError::Input(format!("{} messages for {} trees", messages.len(), trees.len())));
    }
    for (t, &x) in messages.iter().enumerate() {
        check_width(t, 0, x, m)?;
    }
    let r = max_depth(trees);
    let kernel = BroadcastKernel { chunking: Chunking::new(m as usize, plan.per_tree), messages };
    let rounds = broadcast_rounds(r, m, plan.per_tree);
    let per_tree = match execute(sess, label, trees, &kernel, rounds)? {
        Some(out) => out
            .into_iter()
            .map(|t| t.into_iter().map(|v| v.expect("every tree node reports")).collect())
            .collect(),
        None => trees.iter().zip(messages).map(|(t, &x)| vec![x; t.len()]).collect(),
    };
    Ok(Aggregate { per_tree, rounds })
}

/// As [`pipelined_broadcast`] for messages of any length. Every message is
/// padded with zeros to the longest one, which fixes the schedule; each tree
/// node learns its root's padded message.
pub fn pipelined_broadcast_bits(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    messages: &[Bits],
    plan: &ChannelPlan,
) -> Result<Aggregate<Vec<Bits>>, AggError> {
    let shaped: Vec<Vec<()>> = trees.iter().map(|t| vec![(); t.len()]).collect();
    check_shape(trees, plan, &shaped)?;
    if messages.len() != trees.len() {
        return Err(AggError::Input(format!("{} messages for {} trees", messages.len(), trees.len())));
    }
    let total = messages.iter().map(Bits::len).max().unwrap_or(0);
    let padded: Vec<Bits> = messages
        .iter()
        .map(|m| {
            let mut b = m.clone();
            (m.len()..total).for_each(|_| b.push(false));
            b
        })
        .collect();
    let r = max_depth(trees);
    let chunking = Chunking::new(total, plan.per_tree);
    let rounds = pass_rounds(r, chunking.count());
    let kernel = StreamKernel { chunking, messages: &padded };
    let per_tree = match execute(sess, label, trees, &kernel, rounds)? {
        Some(out) => out
            .into_iter()
            .map(|t| t.into_iter().map(|v| v.expect("every tree node reports")).collect())
            .collect(),
        None => trees.iter().zip(&padded).map(|(t, x)| vec![x.clone(); t.len()]).collect(),
    };
    Ok(Aggregate { per_tree, rounds })
}

struct StreamKernel<'a> {
    chunking: Chunking,
    messages: &'a [Bits],
}

struct StreamLocal {
    bits: Bits,
    has_children: bool,
}

impl Kernel for StreamKernel<'_> {
    type Local = StreamLocal;
    type Out = Bits;

    fn upward(&self) -> bool {
        false
    }

    fn init(&self, tree: usize, _pos: usize, depth: usize, children: usize) -> StreamLocal {
        let bits = if depth == 0 { self.messages[tree].clone() } else { Bits::new() };
        StreamLocal { bits, has_children: children > 0 }
    }

    fn width(&self, depth: usize, round: u64) -> usize {
        self.chunking.width_of(round as i64 - depth as i64)
    }

    fn take(&self, _depth: usize, _round: u64, st: &mut StreamLocal, _c: usize, bits: Bits) {
        st.bits.extend(&bits);
    }

    fn advance(&self, depth: usize, round: u64, st: &mut StreamLocal) -> Option<Bits> {
        let k = round as i64 + 1 - depth as i64;
        if self.chunking.width_of(k) == 0 || !st.has_children {
            return None;
        }
        // Chunk k is already held: the root has everything, others got it last round.
        let (start, end) = self.chunking.bounds(k as u64);
        Some(st.bits.slice(start, end))
    }

    fn finish(&self, _depth: usize, st: StreamLocal) -> Bits {
        st.bits
    }
}

struct ConvergecastKernel<'a> {
    r: usize,
    m: usize,
    cap: usize,
    chunking: Chunking,
    items: &'a [Vec<Vec<u64>>],
}

struct Stream {
    bits: Bits,
    consumed: usize,
}

struct CastLocal {
    own: VecDeque<u64>,
    children: Vec<Stream>,
    alive: Vec<bool>,
    produced: usize,
    /// Root only: the merged stream.
    root_stream: Bits,
}

impl ConvergecastKernel<'_> {
    fn slot(&self) -> usize {
        self.m + 1
    }

    /// Bit `o` of candidate `s`'s current head slot.
    fn head_bit(&self, st: &CastLocal, s: usize, o: usize) -> bool {
        if s == 0 {
            match st.own.front() {
                None => o == 0,
                Some(&x) => o > 0 && (x >> (self.m - o)) & 1 == 1,
            }
        } else {
            let c = &st.children[s - 1];
            c.bits.get(c.consumed * self.slot() + o)
        }
    }

    /// Emits merged-stream bit `q`, consuming the winner at a slot's end.
    fn next_bit(&self, st: &mut CastLocal) -> bool {
        let w = self.slot();
        let o = st.produced % w;
        if o == 0 {
            st.alive.iter_mut().for_each(|a| *a = true);
        }
        let bits: Vec<bool> = (0..st.alive.len()).map(|s| st.alive[s] && self.head_bit(st, s, o)).collect();
        let best = (0..st.alive.len()).filter(|&s| st.alive[s]).map(|s| bits[s]).min().expect("a candidate survives");
        for s in 0..st.alive.len() {
            if st.alive[s] && bits[s] != best {
                st.alive[s] = false;
            }
        }
        if o == w - 1 {
            let winner = st.alive.iter().position(|&a| a).expect("a candidate survives");
            let is_end = self.head_bit(st, winner, 0);
            if !is_end {
                if winner == 0 {
                    st.own.pop_front();
                } else {
                    st.children[winner - 1].consumed += 1;
                }
            }
        }
        st.produced += 1;
        best
    }
}

fn decode_stream(stream: &Bits, m: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut r = stream.reader();
    while r.remaining() >= m + 1 {
        if r.bit() {
            break;
        }
        out.push(r.uint(m as u32));
    }
    out
}

impl Kernel for ConvergecastKernel<'_> {
    type Local = CastLocal;
    type Out = Vec<u64>;

    fn upward(&self) -> bool {
        true
    }

    fn init(&self, tree: usize, pos: usize, _depth: usize, children: usize) -> CastLocal {
        let mut own = self.items[tree][pos].clone();
        own.sort_unstable();
        own.truncate(self.cap);
        CastLocal {
            own: own.into(),
            children: (0..children).map(|_| Stream { bits: Bits::new(), consumed: 0 }).collect(),
            alive: vec![true; children + 1],
            produced: 0,
            root_stream: Bits::new(),
        }
    }

    fn width(&self, depth: usize, round: u64) -> usize {
        self.chunking.width_of(round as i64 - (self.r as i64 - depth as i64))
    }

    fn take(&self, _depth: usize, _round: u64, st: &mut CastLocal, c: usize, bits: Bits) {
        st.children[c].bits.extend(&bits);
    }

    fn advance(&self, depth: usize, round: u64, st: &mut CastLocal) -> Option<Bits> {
        let k = round as i64 + 1 - (self.r as i64 - depth as i64);
        let w = self.chunking.width_of(k);
        if w == 0 {
            return None;
        }
        let chunk: Bits = (0..w).map(|_| self.next_bit(st)).collect();
        if depth == 0 {
            st.root_stream.extend(&chunk);
            None
        } else {
            Some(chunk)
        }
    }

    fn finish(&self, _depth: usize, st: CastLocal) -> Vec<u64> {
        decode_stream(&st.root_stream, self.m)
    }
}

/// Each root collects the `cap` smallest `m`-bit messages of its tree
/// (numeric order, which is lexicographic on the bits). `items` holds, per
/// tree and position, the messages that node contributes.
pub fn pipelined_convergecast(
    sess: &mut Session<'_>,
    label: &str,
    trees: &[&RootedTree],
    items: &[Vec<Vec<u64>>],
    m: u32,
    cap: usize,
    plan: &ChannelPlan,
) -> Result<Aggregate<Vec<u64>>, AggError> {
    check_shape(trees, plan, items)?;
    for (t, per) in items.iter().enumerate() {
        for (pos, list) in per.iter().enumerate() {
            for &x in list {
                check_width(t, pos, x, m)?;
            }
        }
    }
    let central = |t: usize| {
        let mut all: Vec<u64> = items[t].iter().flatten().copied().collect();
        all.sort_unstable();
        all.truncate(cap);
        all
    };
    let r = max_depth(trees);
    let kernel = ConvergecastKernel {
        r,
        m: m as usize,
        cap,
        chunking: Chunking::new(cap * (m as usize + 1), plan.per_tree),
        items,
    };
    let rounds = convergecast_rounds(r, m, cap, plan.per_tree);
    let per_tree = match execute(sess, label, trees, &kernel, rounds)? {
        Some(out) => out.into_iter().map(|mut o| o[0].take().expect("root output")).collect(),
        None => (0..trees.len()).map(central).collect(),
    };
    Ok(Aggregate { per_tree, rounds })
}
