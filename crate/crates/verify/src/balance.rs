use std::collections::BTreeMap;

use crate::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Red,
    Blue,
    Uncolored,
}

impl Side {
    /// `r`, `b` or `u`.
    pub fn parse(c: char) -> Option<Self> {
        match c {
            'r' => Some(Side::Red),
            'b' => Some(Side::Blue),
            'u' => Some(Side::Uncolored),
            _ => None,
        }
    }
}

/// Balance with the cap `⌈num·k/den⌉` on each color of `k` entities.
/// With `components`, the cap applies per component of ≥ 2 entities;
/// otherwise to the whole scope.
pub fn check_balance(colors: &[Side], components: Option<&[usize]>, factor: (u64, u64)) -> CheckReport {
    let (num, den) = factor;
    check_balance_with(colors, components, |k| (num as usize * k).div_ceil(den as usize))
}

/// As [`check_balance`] with an arbitrary cap per class size.
pub fn check_balance_with(colors: &[Side], components: Option<&[usize]>, cap: impl Fn(usize) -> usize) -> CheckReport {
    let mut r = CheckReport::new();
    let mut groups: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for (e, &c) in colors.iter().enumerate() {
        let key = components.map_or(0, |comp| comp[e]);
        let g = groups.entry(key).or_default();
        match c {
            Side::Red => g.0 += 1,
            Side::Blue => g.1 += 1,
            Side::Uncolored => g.2 += 1,
        }
    }
    let name = if components.is_some() { "per_component" } else { "global" };
    r.pass(name);
    let mut worst = 0usize;
    for (&key, &(red, blue, unc)) in &groups {
        let k = red + blue + unc;
        if components.is_some() && k < 2 {
            continue;
        }
        let c = cap(k);
        worst = worst.max(red.max(blue));
        if red > c || blue > c {
            let w = format!("component {key}: {red} red, {blue} blue of {k}; cap {c}");
            r.fail(name, w);
        }
    }
    r.measure("max_class", worst);
    r.measure("uncolored", colors.iter().filter(|&&c| c == Side::Uncolored).count());
    r
}
