//! Replay of a carve log (the `carve v1` text written by the carving crate).
//!
//! The checker rebuilds clusters, tokens, levels, transcripts and Steiner
//! trees from the log alone and compares them against every reported value.
//! Named checks:
//!
//! | name          | meaning                                                        |
//! |---------------|----------------------------------------------------------------|
//! | format        | the log parses                                                 |
//! | replay        | reported state equals the replayed state                       |
//! | proposals     | every proposal is legal under the level/mark rule              |
//! | invariant1    | token lower bound at phase start; kills keep > half the tokens |
//! | invariant2    | moves raise the potential; potentials never drop across phases|
//! | changes       | per-node cluster changes ≤ `6L + 1` (baseline: ≤ phases)       |
//! | token_budget  | tokens created ≤ `7·|S|·L`                                     |
//! | kills         | killed ≤ `|S| / 2`                                             |
//! | ancestry      | adjacent clusters have comparable transcripts, at every step   |
//! | steiner       | trees are trees in `G[S]`, entered once per node, terminals = members |
//! | finished      | every cluster reaches the top level by the last phase          |
//! | separation    | no edge joins two surviving clusters                           |
//! | uncolored     | an uncolored cluster never touches a same-level cluster        |
//! | bits          | baseline on id bits: after phase `i` adjacent ids share `i` low bits |
//! | contraction   | baseline on colors: each multi-cluster component shrinks to ≤ ⌊3k/4⌋ |

use std::collections::HashMap;

use crate::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Id,
    Balanced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Token(Source),
    Baseline(Source),
}

impl Kind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "id" => Kind::Token(Source::Id),
            "balanced" => Kind::Token(Source::Balanced),
            "rg" => Kind::Baseline(Source::Id),
            "rg-balanced" => Kind::Baseline(Source::Balanced),
            _ => return None,
        })
    }

    fn token(self) -> bool {
        matches!(self, Kind::Token(_))
    }

    fn source(self) -> Source {
        match self {
            Kind::Token(s) | Kind::Baseline(s) => s,
        }
    }
}

/// Header of a carve log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceParams {
    pub variant: String,
    pub n: usize,
    pub b: u32,
    pub l: u32,
    pub phases: u32,
    pub steps: u32,
    pub accept: u128,
    pub kill: u128,
}

#[derive(Clone, Debug)]
struct Cl {
    id: u64,
    level: u32,
    tokens: u128,
    start_tokens: u128,
    members: usize,
    /// Phase-start values as reported.
    pc_level: u32,
    mark: char,
    stalling: bool,
    stalled_in_phase: bool,
    leveled: bool,
    finished: bool,
    dissolved: bool,
    fresh: bool,
    last_phi: Option<i64>,
    transcript: Vec<u32>,
    tree: Vec<(usize, Option<usize>, bool)>,
    tree_pos: HashMap<usize, usize>,
}

impl Cl {
    fn bit(&self) -> i64 {
        matches!(self.mark, '1' | 'b') as i64
    }

    fn live(&self) -> bool {
        !self.dissolved
    }

    fn active(&self) -> bool {
        !self.stalling && !self.finished && !self.dissolved
    }
}

struct Step {
    /// `(node, from, to, contact)`.
    proposals: Vec<(usize, usize, usize, usize)>,
    /// `(cluster, accept, proposals, cost, reported tokens)`.
    verdicts: Vec<(usize, bool, u128, u128, u128)>,
}

struct Replay {
    kind: Kind,
    p: TraceParams,
    r: CheckReport,
    id: Vec<Option<u64>>,
    adj: Vec<Vec<usize>>,
    s_len: usize,
    alive: Vec<bool>,
    cluster_of: Vec<usize>,
    changes: Vec<u32>,
    cls: Vec<Option<Cl>>,
    phase: u32,
    last_step: u32,
    in_body: bool,
    pc_seen: Vec<bool>,
    step: Option<Step>,
    kills: usize,
    created: u128,
    comp_start: Vec<usize>,
    comp_size: HashMap<usize, usize>,
    ended: bool,
    out: Vec<Option<usize>>,
    tree_lines: HashMap<usize, Vec<(usize, Option<usize>, bool)>>,
    event_steps: u64,
}

fn num<T: std::str::FromStr>(s: &str) -> Option<T> {
    s.parse().ok()
}

fn kv<T: std::str::FromStr>(parts: &[&str], key: &str) -> Option<T> {
    parts.iter().find_map(|p| p.strip_prefix(key).and_then(|r| r.strip_prefix('=')).and_then(num))
}

fn comparable(a: &[u32], b: &[u32]) -> bool {
    let k = a.len().min(b.len());
    a[..k] == b[..k]
}

fn offset(mark: char) -> u32 {
    match mark {
        '0' | 'r' => 0,
        '1' | 'b' => 1,
        _ => 2,
    }
}

impl Replay {
    fn cl(&self, h: usize) -> Option<&Cl> {
        self.cls.get(h).and_then(Option::as_ref)
    }

    fn phi(&self, h: usize) -> i64 {
        let c = self.cl(h).expect("known cluster");
        3 * self.phase as i64 - 2 * c.pc_level as i64 + c.bit()
    }

    fn handles(&self) -> Vec<usize> {
        (0..self.cls.len()).filter(|&h| self.cl(h).is_some_and(Cl::live)).collect()
    }

    fn cluster_at(&self, v: usize) -> Option<usize> {
        (v < self.alive.len() && self.alive[v]).then(|| self.cluster_of[v])
    }

    /// Checks on one living edge between different clusters.
    fn edge(&mut self, u: usize, v: usize, when: &str) {
        let (Some(a), Some(b)) = (self.cluster_at(u), self.cluster_at(v)) else { return };
        if a == b {
            return;
        }
        let (ca, cb) = (self.cls[a].as_ref().unwrap(), self.cls[b].as_ref().unwrap());
        if self.kind.token() && !comparable(&ca.transcript, &cb.transcript) {
            let w = format!("{when}: edge {u}-{v} joins clusters {a} {:?} and {b} {:?}", ca.transcript, cb.transcript);
            self.r.fail("ancestry", w);
        }
        if self.kind == Kind::Token(Source::Balanced) {
            for (x, y, cx, cy) in [(a, b, ca, cb), (b, a, cb, ca)] {
                if cx.mark == 'u' && !cx.finished && cx.level == cy.level {
                    let w = format!("{when}: uncolored cluster {x} touches cluster {y} at level {}", cx.level);
                    self.r.fail("uncolored", w);
                }
            }
        }
    }

    fn scan_edges(&mut self, when: &str) {
        for u in 0..self.adj.len() {
            for j in 0..self.adj[u].len() {
                let v = self.adj[u][j];
                if u < v {
                    self.edge(u, v, when);
                }
            }
        }
    }

    /// Cluster-graph components over living nodes: handle → root handle.
    fn components(&self) -> (Vec<usize>, HashMap<usize, usize>) {
        let n = self.cls.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if let (Some(a), Some(b)) = (self.cluster_at(u), self.cluster_at(v)) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut size = HashMap::new();
        let mut root = vec![usize::MAX; n];
        for h in self.handles() {
            if self.cl(h).unwrap().members == 0 {
                continue;
            }
            root[h] = find(&mut parent, h);
            *size.entry(root[h]).or_insert(0) += 1;
        }
        (root, size)
    }

    fn begin_body(&mut self) {
        if self.in_body || self.phase == 0 {
            return;
        }
        self.in_body = true;
        for h in self.handles() {
            if !self.pc_seen[h] {
                self.r.fail("replay", format!("phase {}: live cluster {h} has no `pc` line", self.phase));
            }
        }
        let when = format!("phase {} start", self.phase);
        self.scan_edges(&when);
        if self.kind == Kind::Baseline(Source::Balanced) {
            let (root, size) = self.components();
            self.comp_start = root;
            self.comp_size = size;
        }
    }

    fn end_phase(&mut self) {
        self.flush();
        if self.phase == 0 {
            return;
        }
        self.begin_body();
        let i = self.phase;
        for h in self.handles() {
            let c = self.cls[h].as_ref().unwrap();
            if self.kind.token() && c.stalled_in_phase && !c.leveled && c.level < self.p.b {
                self.r.fail("replay", format!("phase {i}: cluster {h} stalled but did not level up"));
            }
            if c.members == 0 {
                self.r.fail("replay", format!("phase {i}: cluster {h} is empty but not dissolved"));
            }
        }
        let when = format!("phase {i} end");
        self.scan_edges(&when);
        match self.kind {
            Kind::Baseline(Source::Id) => {
                let mask = if i >= 64 { u64::MAX } else { (1u64 << i) - 1 };
                'edges: for u in 0..self.adj.len() {
                    for &v in &self.adj[u] {
                        if let (Some(a), Some(b)) = (self.cluster_at(u), self.cluster_at(v)) {
                            let (x, y) = (self.cl(a).unwrap().id, self.cl(b).unwrap().id);
                            if a != b && (x ^ y) & mask != 0 {
                                self.r.fail("bits", format!("after phase {i}: edge {u}-{v} joins ids {x} and {y}"));
                                break 'edges;
                            }
                        }
                    }
                }
            }
            Kind::Baseline(Source::Balanced) => {
                let (root, size) = self.components();
                let mut origin: HashMap<usize, usize> = HashMap::new();
                for h in self.handles() {
                    if root[h] == usize::MAX {
                        continue;
                    }
                    let old = self.comp_start.get(h).copied().unwrap_or(usize::MAX);
                    if *origin.entry(root[h]).or_insert(old) != old {
                        self.r.fail("contraction", format!("after phase {i}: cluster {h} merged two components"));
                    }
                }
                for (new_root, old) in origin {
                    let k = self.comp_size.get(&old).copied().unwrap_or(0);
                    let now = size[&new_root];
                    if k >= 2 && 4 * now > 3 * k {
                        let w = format!("after phase {i}: a component of {k} clusters still has {now} together");
                        self.r.fail("contraction", w);
                    }
                }
            }
            Kind::Token(_) => {}
        }
        for h in self.handles() {
            let c = self.cls[h].as_mut().unwrap();
            c.stalling = false;
            c.fresh = !self.kind.token() || c.leveled;
            c.stalled_in_phase = false;
            c.leveled = false;
        }
    }

    fn on_pc(&mut self, f: &[&str]) -> Result<(), String> {
        let (h, lev, tok, mark, phi): (usize, u32, u128, char, i64) = (
            num(f[1]).ok_or("bad handle")?,
            num(f[2]).ok_or("bad level")?,
            num(f[3]).ok_or("bad tokens")?,
            f[4].chars().next().ok_or("bad mark")?,
            num(f[5]).ok_or("bad potential")?,
        );
        if self.in_body {
            return Err("`pc` after the phase's first step".into());
        }
        let i = self.phase;
        let (b, kind) = (self.p.b, self.kind);
        let c = self.cls.get_mut(h).and_then(Option::as_mut).ok_or(format!("unknown cluster {h}"))?;
        if c.dissolved {
            return Err(format!("dissolved cluster {h} reported live"));
        }
        self.pc_seen[h] = true;
        if c.level != lev || (kind.token() && c.tokens != tok) || (!kind.token() && c.members as u128 != tok) {
            let w = format!("phase {i}: cluster {h} reported level {lev}, tokens {tok}; replay has {}, {}", c.level, c.tokens);
            self.r.fail("replay", w);
        }
        let expect_mark = match kind {
            Kind::Token(Source::Id) => Some(if lev < b && lev < 64 && (c.id >> lev) & 1 == 1 { '1' } else { '0' }),
            Kind::Baseline(Source::Id) => Some(if i - 1 < b && i - 1 < 64 && (c.id >> (i - 1)) & 1 == 1 { '1' } else { '0' }),
            Kind::Token(Source::Balanced) if c.finished => Some('u'),
            Kind::Token(Source::Balanced) if !c.fresh => Some(c.mark),
            _ => None,
        };
        let legal = match kind.source() {
            Source::Id => matches!(mark, '0' | '1'),
            Source::Balanced => matches!(mark, 'r' | 'b' | 'u'),
        };
        if !legal || expect_mark.is_some_and(|m| m != mark) {
            self.r.fail("replay", format!("phase {i}: cluster {h} has mark {mark}, expected {expect_mark:?}"));
        }
        c.mark = mark;
        c.pc_level = lev;
        c.start_tokens = tok;
        let my_phi = 3 * i as i64 - 2 * lev as i64 + c.bit();
        if kind.token() {
            if phi != my_phi {
                self.r.fail("replay", format!("phase {i}: cluster {h} reports potential {phi}, formula gives {my_phi}"));
            }
            if let Some(prev) = c.last_phi {
                if my_phi < prev {
                    self.r.fail("invariant2", format!("phase {i}: potential of cluster {h} fell from {prev} to {my_phi}"));
                }
            }
            c.last_phi = Some(my_phi);
            if lev < b {
                let e = i as i64 - 2 * lev as i64 - 1;
                let ok = if e < 0 { tok >= 1 } else { e < 127 && tok >= 1u128 << e };
                if !ok {
                    let w = format!("phase {i}: cluster {h} at level {lev} holds {tok} tokens, needs 2^{e}");
                    self.r.fail("invariant1", w);
                }
            }
        } else if phi != 0 {
            self.r.fail("replay", format!("phase {i}: baseline cluster {h} reports potential {phi}"));
        }
        Ok(())
    }

    fn on_proposal(&mut self, f: &[&str]) -> Result<(), String> {
        let vals: Vec<usize> = f[1..5].iter().map(|s| num(s).ok_or(format!("bad field `{s}`"))).collect::<Result<_, _>>()?;
        let (v, from, to, contact) = (vals[0], vals[1], vals[2], vals[3]);
        let i = self.phase;
        let step = self.step.as_mut().ok_or("proposal outside a step")?;
        step.proposals.push((v, from, to, contact));
        let here = format!("phase {i} step {}: node {v} → cluster {to} via {contact}", self.last_step);
        if self.cluster_at(v) != Some(from) || self.cluster_at(contact) != Some(to) || from == to {
            self.r.fail("replay", format!("{here}: node or contact is not where the log says"));
            return Ok(());
        }
        if !self.adj[v].contains(&contact) {
            self.r.fail("proposals", format!("{here}: {v}-{contact} is not an edge of G[S]"));
        }
        let (cf, ct) = (self.cl(from).unwrap(), self.cl(to).unwrap());
        let lower = ct.pc_level < cf.pc_level;
        let same = ct.pc_level == cf.pc_level && matches!(cf.mark, '0' | 'r') && matches!(ct.mark, '1' | 'b');
        if !ct.active() || !(lower || same) {
            let w = format!(
                "{here}: from level {} mark {} to level {} mark {} (active {})",
                cf.pc_level,
                cf.mark,
                ct.pc_level,
                ct.mark,
                ct.active()
            );
            self.r.fail("proposals", w);
        }
        Ok(())
    }

    fn on_verdict(&mut self, f: &[&str], accept: bool) -> Result<(), String> {
        let h: usize = num(f[1]).ok_or("bad handle")?;
        let p: u128 = num(f[2]).ok_or("bad count")?;
        let (cost, tokens) = if accept {
            (0, num(f[3]).ok_or("bad tokens")?)
        } else {
            (num(f[3]).ok_or("bad cost")?, num(f[4]).ok_or("bad tokens")?)
        };
        let step = self.step.as_mut().ok_or("verdict outside a step")?;
        if step.verdicts.iter().any(|x| x.0 == h) {
            return Err(format!("two verdicts for cluster {h}"));
        }
        step.verdicts.push((h, accept, p, cost, tokens));
        Ok(())
    }

    /// Applies the pending step: verdict arithmetic, moves, kills.
    fn flush(&mut self) {
        let Some(step) = self.step.take() else { return };
        let i = self.phase;
        let j = self.last_step;
        let here = format!("phase {i} step {j}");
        let token = self.kind.token();
        let mut counts: HashMap<usize, u128> = HashMap::new();
        let mut proposers = std::collections::HashSet::new();
        for &(v, _, to, _) in &step.proposals {
            *counts.entry(to).or_insert(0) += 1;
            if !proposers.insert(v) {
                self.r.fail("replay", format!("{here}: node {v} proposed twice"));
            }
        }
        let active: Vec<usize> = self.handles().into_iter().filter(|&h| self.cl(h).unwrap().active()).collect();
        let judged: Vec<usize> = step.verdicts.iter().map(|x| x.0).collect();
        if active.iter().any(|h| !judged.contains(h)) || judged.iter().any(|h| !active.contains(h)) {
            self.r.fail("replay", format!("{here}: verdicts for {judged:?}, active clusters {active:?}"));
        }
        let mut accepted = HashMap::new();
        for &(h, acc, p, cost, _) in &step.verdicts {
            let Some(c) = self.cls.get(h).and_then(Option::as_ref) else {
                self.r.fail("replay", format!("{here}: verdict for unknown cluster {h}"));
                continue;
            };
            let got = counts.get(&h).copied().unwrap_or(0);
            if got != p {
                self.r.fail("replay", format!("{here}: cluster {h} reports {p} proposals, log has {got}"));
            }
            let t = if token { c.tokens } else { c.members as u128 };
            let should = p * self.p.accept >= t;
            if should != acc || (!acc && cost != p * self.p.kill) {
                let w = format!("{here}: cluster {h} with {t} tokens and {p} proposals: accept={acc} cost={cost}");
                self.r.fail("replay", w);
            }
            accepted.insert(h, acc);
        }
        let mut moved = Vec::new();
        for &(v, from, to, contact) in &step.proposals {
            if self.cluster_at(v) != Some(from) || self.cl(to).is_none() {
                continue;
            }
            if let Some(cf) = self.cls[from].as_mut() {
                cf.members -= 1;
                if let Some(&k) = cf.tree_pos.get(&v) {
                    cf.tree[k].2 = false;
                }
            }
            if accepted.get(&to) == Some(&true) {
                if token {
                    let (pf, pt) = (self.phi(from), self.phi(to));
                    if pt <= pf {
                        self.r.fail("invariant2", format!("{here}: node {v} moves from potential {pf} to {pt}"));
                    }
                }
                let ct = self.cls[to].as_mut().unwrap();
                if ct.tree_pos.contains_key(&v) {
                    self.r.fail("steiner", format!("{here}: node {v} enters the tree of cluster {to} twice"));
                } else {
                    if !ct.tree_pos.contains_key(&contact) {
                        self.r.fail("steiner", format!("{here}: contact {contact} is not on the tree of cluster {to}"));
                    }
                    ct.tree_pos.insert(v, ct.tree.len());
                    ct.tree.push((v, Some(contact), true));
                }
                ct.members += 1;
                self.cluster_of[v] = to;
                self.changes[v] += 1;
                moved.push(v);
            } else {
                self.alive[v] = false;
                self.kills += 1;
            }
        }
        for &(h, acc, p, cost, tokens) in &step.verdicts {
            let Some(c) = self.cls.get_mut(h).and_then(Option::as_mut) else { continue };
            if token {
                if acc {
                    c.tokens += p;
                    self.created += p;
                } else {
                    if cost >= c.tokens || 2 * (c.tokens - cost) <= c.start_tokens {
                        let w = format!("{here}: cluster {h} pays {cost} of {} tokens (phase start {})", c.tokens, c.start_tokens);
                        self.r.fail("invariant1", w);
                    }
                    c.tokens = c.tokens.saturating_sub(cost);
                }
            } else {
                c.tokens = c.members as u128;
            }
            if !acc {
                c.stalling = true;
                c.stalled_in_phase = true;
            }
            if tokens != c.tokens {
                self.r.fail("replay", format!("{here}: cluster {h} reports {tokens} tokens, replay has {}", c.tokens));
            }
        }
        let when = here.clone();
        for v in moved {
            for k in 0..self.adj[v].len() {
                let w = self.adj[v][k];
                self.edge(v, w, &when);
            }
        }
    }

    fn on_line(&mut self, f: &[&str]) -> Result<(), String> {
        match (f[0], f.len()) {
            ("s", 3) => {
                let v: usize = num(f[1]).ok_or("bad node")?;
                let id: u64 = num(f[2]).ok_or("bad id")?;
                if v >= self.p.n || self.id[v].replace(id).is_some() || self.phase > 0 {
                    return Err(format!("bad `s` line for node {v}"));
                }
                self.alive[v] = true;
                self.cluster_of[v] = v;
                self.s_len += 1;
                self.cls[v] = Some(Cl {
                    id,
                    level: 0,
                    tokens: 1,
                    start_tokens: 1,
                    members: 1,
                    pc_level: 0,
                    mark: '0',
                    stalling: false,
                    stalled_in_phase: false,
                    leveled: false,
                    finished: false,
                    dissolved: false,
                    fresh: true,
                    last_phi: None,
                    transcript: Vec::new(),
                    tree: vec![(v, None, true)],
                    tree_pos: HashMap::from([(v, 0)]),
                });
                self.created += 1;
            }
            ("g", 3) => {
                let (u, v): (usize, usize) = (num(f[1]).ok_or("bad node")?, num(f[2]).ok_or("bad node")?);
                if u >= v || v >= self.p.n || self.id[u].is_none() || self.id[v].is_none() {
                    return Err(format!("bad edge {u} {v}"));
                }
                self.adj[u].push(v);
                self.adj[v].push(u);
            }
            ("phase", 2) => {
                let i: u32 = num(f[1]).ok_or("bad phase")?;
                self.end_phase();
                if i != self.phase + 1 || i > self.p.phases {
                    return Err(format!("phase {i} after phase {}", self.phase));
                }
                self.phase = i;
                self.last_step = 0;
                self.in_body = false;
                self.pc_seen.iter_mut().for_each(|x| *x = false);
            }
            ("pc", 6) => self.on_pc(f)?,
            ("step", 3) => {
                self.flush();
                self.begin_body();
                let (i, j): (u32, u32) = (num(f[1]).ok_or("bad phase")?, num(f[2]).ok_or("bad step")?);
                if i != self.phase || j <= self.last_step || j > self.p.steps {
                    return Err(format!("step {i} {j} out of order"));
                }
                self.last_step = j;
                self.event_steps += 1;
                self.step = Some(Step { proposals: Vec::new(), verdicts: Vec::new() });
            }
            ("p", 5) => self.on_proposal(f)?,
            ("a", 4) => self.on_verdict(f, true)?,
            ("k", 5) => self.on_verdict(f, false)?,
            ("d", 2) => {
                self.flush();
                let h: usize = num(f[1]).ok_or("bad handle")?;
                let c = self.cls.get_mut(h).and_then(Option::as_mut).ok_or(format!("unknown cluster {h}"))?;
                if c.members != 0 || c.dissolved {
                    self.r.fail("replay", format!("cluster {h} dissolved with {} members", c.members));
                }
                c.dissolved = true;
                c.stalling = false;
            }
            ("lv", 4) => {
                self.flush();
                self.begin_body();
                let (h, lev, br): (usize, u32, u32) =
                    (num(f[1]).ok_or("bad handle")?, num(f[2]).ok_or("bad level")?, num(f[3]).ok_or("bad branch")?);
                let branches = match self.kind.source() {
                    Source::Id => 2,
                    Source::Balanced => 3,
                };
                let i = self.phase;
                let c = self.cls.get_mut(h).and_then(Option::as_mut).ok_or(format!("unknown cluster {h}"))?;
                let want = branches * i + offset(c.mark);
                if !self.kind.token() || !c.stalled_in_phase || c.leveled || c.finished || lev != c.level + 1 || br != want {
                    let w = format!("phase {i}: cluster {h} moves to level {lev} by branch {br} (level {}, branch {want})", c.level);
                    self.r.fail("replay", w);
                }
                c.level = lev;
                c.leveled = true;
                c.transcript.push(br);
            }
            ("fin", 2) => {
                let h: usize = num(f[1]).ok_or("bad handle")?;
                let b = self.p.b;
                let c = self.cls.get_mut(h).and_then(Option::as_mut).ok_or(format!("unknown cluster {h}"))?;
                if c.level != b || c.finished {
                    self.r.fail("replay", format!("cluster {h} finishes at level {} of {b}", c.level));
                }
                c.finished = true;
            }
            ("end", 1) => {
                self.end_phase();
                self.ended = true;
            }
            ("out", 3) => {
                let (v, h): (usize, usize) = (num(f[1]).ok_or("bad node")?, num(f[2]).ok_or("bad handle")?);
                if !self.ended || v >= self.p.n || self.out[v].replace(h).is_some() {
                    return Err(format!("bad `out` line for node {v}"));
                }
            }
            ("tree", 5) => {
                let (h, v): (usize, usize) = (num(f[1]).ok_or("bad handle")?, num(f[2]).ok_or("bad node")?);
                let parent = if f[3] == "-" { None } else { Some(num(f[3]).ok_or("bad parent")?) };
                self.tree_lines.entry(h).or_default().push((v, parent, f[4] == "1"));
            }
            ("stat", 5) => {
                let kills: Option<usize> = kv(f, "kills");
                let surv: Option<usize> = kv(f, "survivors");
                let created: Option<u128> = kv(f, "tokens_created");
                let maxc: Option<u32> = kv(f, "max_changes");
                let alive = self.alive.iter().filter(|&&a| a).count();
                let my_created = if self.kind.token() { self.created } else { self.s_len as u128 };
                let mine = (Some(self.kills), Some(alive), Some(my_created), Some(self.changes.iter().copied().max().unwrap_or(0)));
                if (kills, surv, created, maxc) != mine {
                    self.r.fail("replay", format!("stat line {:?} differs from replay {mine:?}", (kills, surv, created, maxc)));
                }
            }
            _ => return Err(format!("unexpected record `{}`", f.join(" "))),
        }
        Ok(())
    }

    fn finish(&mut self) {
        let alive: Vec<usize> = (0..self.p.n).filter(|&v| self.alive[v]).collect();
        for v in 0..self.p.n {
            let want = self.alive[v].then(|| self.cluster_of[v]);
            if self.out[v] != want {
                self.r.fail("replay", format!("node {v}: `out` says {:?}, replay has {want:?}", self.out[v]));
                break;
            }
        }
        for h in 0..self.cls.len() {
            let Some(c) = self.cl(h) else { continue };
            let logged = self.tree_lines.get(&h).cloned().unwrap_or_default();
            if logged != c.tree {
                self.r.fail("replay", format!("tree of cluster {h} differs from replay"));
            }
            let mut seen = std::collections::HashSet::new();
            let mut terms = Vec::new();
            for (k, &(v, par, term)) in logged.iter().enumerate() {
                let shape = match par {
                    None => k == 0,
                    Some(p) => k > 0 && seen.contains(&p) && self.adj.get(v).is_some_and(|a| a.contains(&p)),
                };
                if !shape || !seen.insert(v) {
                    self.r.fail("steiner", format!("tree of cluster {h}: line for node {v} breaks the tree shape"));
                }
                if term {
                    terms.push(v);
                }
            }
            terms.sort_unstable();
            let members: Vec<usize> = alive.iter().copied().filter(|&v| self.cluster_of[v] == h).collect();
            if terms != members {
                self.r.fail("steiner", format!("tree of cluster {h}: terminals {terms:?}, members {members:?}"));
            }
        }
        for u in 0..self.adj.len() {
            for &v in &self.adj[u] {
                if let (Some(a), Some(b)) = (self.cluster_at(u), self.cluster_at(v)) {
                    if a != b {
                        self.r.fail("separation", format!("edge {u}-{v} joins surviving clusters {a} and {b}"));
                    }
                }
            }
        }
        let token = self.kind.token();
        let l = self.p.l as u64;
        let max_changes = self.changes.iter().copied().max().unwrap_or(0) as u64;
        let change_bound = if token { 6 * l + 1 } else { self.p.phases as u64 };
        self.r.expect("changes", max_changes <= change_bound, || format!("a node changed cluster {max_changes} > {change_bound} times"));
        if token {
            let budget = 7 * self.s_len as u128 * l as u128;
            let created = self.created;
            self.r.expect("token_budget", created <= budget, || format!("{created} tokens created > {budget}"));
            let unfinished: Vec<usize> =
                self.handles().into_iter().filter(|&h| !self.cl(h).unwrap().finished).collect();
            self.r.expect("finished", unfinished.is_empty(), || {
                format!("clusters {unfinished:?} below level {} after phase {}", self.p.b, self.phase)
            });
            self.r.pass("invariant1");
            self.r.pass("invariant2");
            self.r.pass("ancestry");
        }
        let (kills, s) = (self.kills, self.s_len);
        self.r.expect("kills", 2 * kills <= s, || format!("{kills} of {s} nodes killed"));
        for name in ["replay", "proposals", "steiner", "separation"] {
            self.r.pass(name);
        }
        match self.kind {
            Kind::Token(Source::Balanced) => self.r.pass("uncolored"),
            Kind::Baseline(Source::Id) => self.r.pass("bits"),
            Kind::Baseline(Source::Balanced) => self.r.pass("contraction"),
            Kind::Token(Source::Id) => {}
        }
        self.r.measure("variant", &self.p.variant);
        self.r.measure("s", s);
        self.r.measure("survivors", alive.len());
        self.r.measure("kills", kills);
        self.r.measure("phases", self.phase);
        self.r.measure("event_steps", self.event_steps);
        self.r.measure("max_changes", max_changes);
        self.r.measure("tokens_created", self.created);
    }
}

/// Reads the `params` header of a carve log.
pub fn parse_trace_params(text: &str) -> Result<TraceParams, String> {
    let mut it = text.lines();
    if it.next().map(str::trim) != Some("carve v1") {
        return Err("line 1: expected `carve v1`".into());
    }
    let variant = it
        .next()
        .and_then(|l| l.strip_prefix("variant "))
        .ok_or("line 2: expected `variant <name>`")?
        .trim()
        .to_string();
    let f: Vec<&str> = it.next().ok_or("line 3: missing `params`")?.split_whitespace().collect();
    if f.first() != Some(&"params") {
        return Err("line 3: expected `params`".into());
    }
    let get = |k: &str| kv::<u128>(&f, k).ok_or(format!("line 3: missing `{k}=`"));
    Ok(TraceParams {
        variant,
        n: get("n")? as usize,
        b: get("b")? as u32,
        l: get("L")? as u32,
        phases: get("phases")? as u32,
        steps: get("steps")? as u32,
        accept: get("accept")?,
        kill: get("kill")?,
    })
}

/// Replays a carve log and reports every named check.
pub fn check_carve_trace(text: &str) -> CheckReport {
    let mut bad = CheckReport::new();
    let p = match parse_trace_params(text) {
        Ok(p) => p,
        Err(e) => {
            bad.fail("format", e);
            return bad;
        }
    };
    let Some(kind) = Kind::parse(&p.variant) else {
        bad.fail("format", format!("unknown variant `{}`", p.variant));
        return bad;
    };
    let n = p.n;
    let mut rp = Replay {
        kind,
        p,
        r: CheckReport::new(),
        id: vec![None; n],
        adj: vec![Vec::new(); n],
        s_len: 0,
        alive: vec![false; n],
        cluster_of: vec![usize::MAX; n],
        changes: vec![0; n],
        cls: vec![None; n],
        phase: 0,
        last_step: 0,
        in_body: false,
        pc_seen: vec![false; n],
        step: None,
        kills: 0,
        created: 0,
        comp_start: Vec::new(),
        comp_size: HashMap::new(),
        ended: false,
        out: vec![None; n],
        tree_lines: HashMap::new(),
        event_steps: 0,
    };
    for (k, line) in text.lines().enumerate().skip(3) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if let Err(e) = rp.on_line(&f) {
            rp.r.fail("format", format!("line {}: {e}", k + 1));
            return rp.r;
        }
    }
    if !rp.ended {
        rp.r.fail("format", "missing `end`");
        return rp.r;
    }
    if rp.phase != rp.p.phases && rp.kind.token() {
        let w = format!("log stops after phase {} of {}", rp.phase, rp.p.phases);
        rp.r.fail("finished", w);
    }
    rp.r.pass("format");
    rp.finish();
    rp.r
}
