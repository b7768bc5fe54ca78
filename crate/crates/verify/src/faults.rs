//! Deliberate corruptions of a valid carve log, each aimed at one named check
//! of [`crate::check_carve_trace`]. They return `None` when the log has no
//! suitable site (e.g. no accepted move at all).

use crate::parse_trace_params;

fn fields(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

/// Zeroes the tokens of the first unfinished cluster in a `pc` line.
/// Expected failure: `invariant1`.
pub fn forge_token_drop(trace: &str) -> Option<String> {
    let b = parse_trace_params(trace).ok()?.b;
    let mut lines: Vec<String> = trace.lines().map(str::to_string).collect();
    let k = lines.iter().position(|l| {
        let f = fields(l);
        f.len() == 6 && f[0] == "pc" && f[2].parse::<u32>().is_ok_and(|lev| lev < b)
    })?;
    let f = fields(&lines[k]);
    lines[k] = format!("pc {} {} 0 {} {}", f[1], f[2], f[4], f[5]);
    Some(lines.join("\n") + "\n")
}

/// Picks an accepted move `from → to` in some phase and raises the level
/// that `to` reports at that phase's start until `Φ(to) < Φ(from)`, keeping
/// the reported potential consistent with the new level.
/// Expected failure: `invariant2`.
pub fn forge_potential_drop(trace: &str) -> Option<String> {
    let mut lines: Vec<String> = trace.lines().map(str::to_string).collect();
    let mut phase_start = 0;
    let mut phase = 0i64;
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for k in 0..lines.len() {
        let f = fields(&lines[k]);
        match f.first().copied() {
            Some("phase") => {
                phase_start = k;
                phase = f[1].parse().ok()?;
            }
            Some("step") => pending.clear(),
            Some("p") => pending.push((f[2].parse().ok()?, f[3].parse().ok()?)),
            Some("a") => {
                let to: usize = f[1].parse().ok()?;
                let Some(&(from, _)) = pending.iter().find(|&&(_, t)| t == to) else { continue };
                let pc = |h: usize, lines: &[String]| {
                    lines[phase_start..k].iter().position(|l| {
                        let f = fields(l);
                        f.len() == 6 && f[0] == "pc" && f[1] == h.to_string()
                    })
                };
                let (kf, kt) = (phase_start + pc(from, &lines)?, phase_start + pc(to, &lines)?);
                let (ff, ft) = (fields(&lines[kf]), fields(&lines[kt]));
                let (phi_from, phi_to): (i64, i64) = (ff[5].parse().ok()?, ft[5].parse().ok()?);
                let lev: i64 = ft[2].parse().ok()?;
                let bump = (phi_to - phi_from) / 2 + 1;
                let new_lev = lev + bump;
                let bit = matches!(ft[4], "1" | "b") as i64;
                let new_phi = 3 * phase - 2 * new_lev + bit;
                lines[kt] = format!("pc {} {new_lev} {} {} {new_phi}", ft[1], ft[3], ft[4]);
                return Some(lines.join("\n") + "\n");
            }
            _ => {}
        }
    }
    None
}

/// Deletes the last `lv` line of some cluster together with its `fin`.
/// Expected failure: `finished`.
pub fn forge_unfinished(trace: &str) -> Option<String> {
    let lines: Vec<&str> = trace.lines().collect();
    let k = lines.iter().rposition(|l| l.starts_with("fin "))?;
    let h = fields(lines[k])[1];
    let lv = lines[..k].iter().rposition(|l| {
        let f = fields(l);
        f[0] == "lv" && f[1] == h
    })?;
    let kept: Vec<&str> = lines.iter().enumerate().filter(|&(i, _)| i != k && i != lv).map(|(_, l)| *l).collect();
    Some(kept.join("\n") + "\n")
}
