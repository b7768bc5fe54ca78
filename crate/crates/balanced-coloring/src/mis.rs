//! Maximal independent set of a bounded-degree virtual graph.
//!
//! Colors start as identifiers and shrink by polynomial set systems (each
//! color is a polynomial over `F_q`, a node keeps one point where it differs
//! from every neighbor), then by block-wise reduction to `Δ̂+1` colors, then
//! the MIS is built greedily one color class per virtual round.
//!
//! The first palette is the whole 64-bit identifier universe, so the
//! resulting colors depend on identifier values only, never on the declared
//! width.

use congest_sim::Session;
use graph_core::ceil_log2;

use crate::ColorError;

/// Degree bound every virtual graph must respect: `(H')²` with `H'` of
/// degree at most 10 (one out-edge, at most 9 in-edges).
pub const MAX_VIRTUAL_DEGREE: usize = 121;

/// Rounds one polynomial color reduction costs under LOCAL, where a virtual
/// round on a square graph takes two hops: the `a` of a round bound
/// `a·log* b + c`.
pub const LOG_STAR_SLOPE: u64 = 2;

/// Transport for virtual rounds.
pub trait VirtualNet {
    /// One virtual round: every `(entity, value)` sender delivers a
    /// `width`-bit value to all of its virtual neighbors.
    fn announce(&mut self, sess: &mut Session<'_>, senders: &[(usize, u64)], width: u32) -> Result<(), ColorError>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MisOutcome {
    pub in_set: Vec<bool>,
    /// Proper coloring with at most `Δ̂+1` colors that the greedy pass used.
    pub colors: Vec<u64>,
    pub linial_steps: u32,
    pub announces: u64,
    pub rounds: u64,
}

/// Polynomial parameters for one reduction from a `k`-color palette:
/// degree `d` and prime `q > Δ̂·d` with `q^{d+1} ≥ k`, minimizing `q`.
pub fn linial_params(k: u128, max_degree: usize) -> (u32, u64) {
    let mut best: Option<(u32, u64)> = None;
    for d in 1..=64u32 {
        let mut q = next_prime(((max_degree as u64) * d as u64 + 1).max(root_ceil(k, d + 1)));
        while pow_sat(q, d + 1) < k {
            q = next_prime(q + 1);
        }
        if best.map_or(true, |(_, bq)| q < bq) {
            best = Some((d, q));
        }
        if (max_degree as u64) * d as u64 + 1 > best.unwrap().1 {
            break;
        }
    }
    best.expect("some degree works")
}

fn pow_sat(q: u64, e: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

/// Smallest `x` with `x^e ≥ k`.
fn root_ceil(k: u128, e: u32) -> u64 {
    let mut x = (k as f64).powf(1.0 / e as f64) as u64;
    while x > 1 && pow_sat(x - 1, e) >= k {
        x -= 1;
    }
    while pow_sat(x, e) < k {
        x += 1;
    }
    x
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| x % d != 0)
}

fn next_prime(mut x: u64) -> u64 {
    while !is_prime(x) {
        x += 1;
    }
    x
}

/// The sequence of `(d, q)` reductions applied to the 64-bit universe.
pub fn linial_schedule(max_degree: usize) -> Vec<(u32, u64)> {
    let mut k: u128 = 1 << 64;
    let mut out = Vec::new();
    loop {
        let (d, q) = linial_params(k, max_degree);
        let next = (q as u128) * (q as u128);
        if next >= k {
            return out;
        }
        out.push((d, q));
        k = next;
    }
}

/// Palette size after the polynomial reductions.
pub fn linial_palette(max_degree: usize) -> u128 {
    linial_schedule(max_degree).last().map_or(1 << 64, |&(_, q)| (q as u128) * (q as u128))
}

/// Number of block-reduction stages from `k` colors down to `Δ̂+1`.
fn block_stages(mut k: u128, d: u128) -> u32 {
    let mut stages = 0;
    while k > d {
        k = k.div_ceil(2 * d) * d;
        stages += 1;
    }
    stages
}

/// Virtual rounds of [`linial_mis`]: identifier announce, one per polynomial
/// reduction, `Δ̂+1` per block stage, `Δ̂+1` for the greedy pass. Fixed for a
/// given degree bound.
pub fn mis_announces(max_degree: usize) -> u64 {
    let d = max_degree as u128 + 1;
    let linial = linial_schedule(max_degree).len() as u64;
    1 + linial + (block_stages(linial_palette(max_degree), d) as u64 + 1) * d as u64
}

/// `P_c(x)` where the base-`q` digits of `c` are the coefficients.
fn eval(c: u128, q: u64, d: u32, x: u64) -> u64 {
    let q128 = q as u128;
    let mut digits = [0u64; 65];
    let mut rest = c;
    for slot in digits.iter_mut().take(d as usize + 1) {
        *slot = (rest % q128) as u64;
        rest /= q128;
    }
    let mut acc: u64 = 0;
    for j in (0..=d as usize).rev() {
        acc = ((acc as u128 * x as u128 + digits[j] as u128) % q128) as u64;
    }
    acc
}

/// Maximal independent set of the virtual graph `adj` (symmetric, degree at
/// most [`MAX_VIRTUAL_DEGREE`]) whose entities carry the distinct
/// identifiers `ids` of width `id_bits`.
pub fn linial_mis(
    sess: &mut Session<'_>,
    adj: &[Vec<usize>],
    ids: &[u64],
    id_bits: u32,
    net: &mut dyn VirtualNet,
) -> Result<MisOutcome, ColorError> {
    let n = adj.len();
    assert_eq!(ids.len(), n);
    if let Some(v) = (0..n).find(|&v| adj[v].len() > MAX_VIRTUAL_DEGREE) {
        return Err(ColorError::Degree { entity: v, degree: adj[v].len(), bound: MAX_VIRTUAL_DEGREE });
    }
    for v in 0..n {
        if let Some(&u) = adj[v].iter().find(|&&u| ids[u] == ids[v]) {
            return Err(ColorError::Input(format!("adjacent entities {v} and {u} share identifier {}", ids[v])));
        }
    }
    let start = sess.metrics().rounds_total;
    let mut announces = 0u64;
    let mut announce = |sess: &mut Session<'_>, senders: &[(usize, u64)], width: u32| {
        announces += 1;
        net.announce(sess, senders, width)
    };

    let everyone = |c: &[u128]| -> Vec<(usize, u64)> { (0..n).map(|v| (v, c[v] as u64)).collect() };
    let mut color: Vec<u128> = ids.iter().map(|&x| x as u128).collect();
    announce(sess, &everyone(&color), id_bits)?;

    let schedule = linial_schedule(MAX_VIRTUAL_DEGREE);
    for &(d, q) in &schedule {
        let next: Vec<u128> = (0..n)
            .map(|v| {
                let x = (0..q)
                    .find(|&x| {
                        let mine = eval(color[v], q, d, x);
                        adj[v].iter().all(|&u| eval(color[u], q, d, x) != mine)
                    })
                    .expect("q exceeds degree times polynomial degree");
                x as u128 * q as u128 + eval(color[v], q, d, x) as u128
            })
            .collect();
        color = next;
        announce(sess, &everyone(&color), ceil_log2((q * q) as usize).max(1))?;
    }

    // Block reduction: within each block of 2D colors, the upper half moves
    // into the lower half one color per round.
    let dd = MAX_VIRTUAL_DEGREE as u128 + 1;
    let mut k = linial_palette(MAX_VIRTUAL_DEGREE);
    let width = |k: u128| 128 - (k.max(2) - 1).leading_zeros();
    while k > dd {
        let mut movers: Vec<Vec<usize>> = vec![Vec::new(); dd as usize];
        for v in 0..n {
            let local = color[v] % (2 * dd);
            if local >= dd {
                movers[(local - dd) as usize].push(v);
            }
        }
        for group in &movers {
            for &v in group {
                let block = color[v] / (2 * dd);
                let taken: Vec<u128> = adj[v]
                    .iter()
                    .filter(|&&u| color[u] / (2 * dd) == block && color[u] % (2 * dd) < dd)
                    .map(|&u| color[u] % (2 * dd))
                    .collect();
                let free = (0..dd).find(|l| !taken.contains(l)).expect("D exceeds degree");
                color[v] = block * 2 * dd + free;
            }
            let senders: Vec<(usize, u64)> = group.iter().map(|&v| (v, color[v] as u64)).collect();
            announce(sess, &senders, width(k))?;
        }
        for c in color.iter_mut() {
            *c = (*c / (2 * dd)) * dd + *c % (2 * dd);
        }
        k = k.div_ceil(2 * dd) * dd;
    }

    let mut by_color: Vec<Vec<usize>> = vec![Vec::new(); dd as usize];
    for v in 0..n {
        by_color[color[v] as usize].push(v);
    }
    let mut in_set = vec![false; n];
    for group in &by_color {
        let joiners: Vec<usize> = group.iter().copied().filter(|&v| adj[v].iter().all(|&u| !in_set[u])).collect();
        for &v in &joiners {
            in_set[v] = true;
        }
        let senders: Vec<(usize, u64)> = joiners.iter().map(|&v| (v, 1)).collect();
        announce(sess, &senders, 1)?;
    }
    Ok(MisOutcome {
        in_set,
        colors: color.into_iter().map(|c| c as u64).collect(),
        linial_steps: schedule.len() as u32,
        announces,
        rounds: sess.metrics().rounds_total - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universe_schedule() {
        assert_eq!(linial_schedule(121), vec![(6, 727), (2, 251)]);
        assert_eq!(linial_palette(121), 63001);
        assert_eq!(block_stages(63001, 122), 10);
        assert_eq!(mis_announces(121), 1 + 2 + 11 * 122);
    }

    #[test]
    fn polynomials_of_distinct_colors_rarely_agree() {
        let (d, q) = (2, 251);
        for (a, b) in [(0u128, 1u128), (12345, 54321), (62999, 63000)] {
            let agree = (0..q).filter(|&x| eval(a, q, d, x) == eval(b, q, d, x)).count();
            assert!(agree <= d as usize);
        }
    }
}
