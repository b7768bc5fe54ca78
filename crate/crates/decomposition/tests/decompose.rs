use std::collections::VecDeque;

use congest_sim::{Mode, ModelConfig};
use decomposition::*;
use graph_core::{ceil_log2, generate, Graph, GraphSpec, IdAssignment};
use proptest::prelude::*;

fn logical(bw: u32) -> ModelConfig {
    ModelConfig::new(Some(bw), Mode::Logical).unwrap()
}

fn gen(spec: &str, seed: u64) -> Graph {
    generate(&GraphSpec::parse(spec, seed).unwrap()).unwrap()
}

fn dist_from(g: &Graph, src: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for &w in g.neighbors(u) {
            if d[w] == usize::MAX {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn max_weak_diameter(g: &Graph, d: &Decomposition) -> usize {
    let mut best = 0;
    for cl in &d.clusters {
        for &u in &cl.members {
            let dist = dist_from(g, u);
            for &w in &cl.members {
                best = best.max(dist[w]);
            }
        }
    }
    best
}

/// Coverage, same-color non-adjacency, trees spanning exactly their members.
fn assert_valid(g: &Graph, d: &Decomposition) {
    let n = g.n();
    assert_eq!(d.color.len(), n);
    assert!(d.color.iter().all(|&c| c >= 1));
    assert!(d.colors() <= ceil_log2(n) + 1, "{} colors for n = {n}", d.colors());
    for (u, v) in g.edges() {
        if d.color[u] == d.color[v] {
            assert_eq!(d.cluster_of[u], d.cluster_of[v], "edge {u}-{v} joins two clusters of color {}", d.color[u]);
        }
    }
    for (k, cl) in d.clusters.iter().enumerate() {
        let mut terms: Vec<usize> = cl.tree.nodes().iter().copied().filter(|&v| cl.tree.is_terminal(v)).collect();
        terms.sort_unstable();
        assert_eq!(terms, cl.members);
        for &v in &cl.members {
            assert_eq!((d.cluster_of[v], d.color[v]), (k, cl.color));
        }
        for &v in cl.tree.nodes() {
            if let Some(p) = cl.tree.parent_of(v) {
                assert!(g.has_edge(p, v));
            }
        }
    }
}

fn bound_112(p: &Params) -> usize {
    112 * (p.l as usize).pow(2)
}

#[test]
fn single_node_all_variants() {
    let g = Graph::empty(1);
    let ids = IdAssignment::sequential(1);
    for v in Variant::ALL {
        let d = decompose(&g, &ids, logical(16), v).unwrap();
        assert_eq!((d.colors(), d.clusters.len()), (1, 1), "{}", v.name());
        assert_eq!(d.clusters[0].members, vec![0]);
    }
}

#[test]
fn k2_fast_is_one_color() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let d = decompose_fast(&g, &IdAssignment::sequential(2), logical(16)).unwrap();
    assert_eq!((d.colors(), d.clusters.len(), d.kills()), (1, 1, 0));
}

#[test]
fn gnp_1024_fast() {
    let g = gen("gnp:n=1024,p=0.01", 0);
    let d = decompose_fast(&g, &IdAssignment::sequential(g.n()), logical(64)).unwrap();
    assert!(d.colors() <= 11);
    assert_valid(&g, &d);
    assert!(max_weak_diameter(&g, &d) <= bound_112(&d.params));
    assert!(d.max_overlap() <= 6 * d.params.l as usize + 2);
}

#[test]
fn rg_examples() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let ids = IdAssignment::new(1, vec![0, 1]).unwrap();
    let (out, _) = carve_rg_baseline(&g, &ids, &[0, 1], logical(16)).unwrap();
    assert_eq!((out.clusters.len(), out.kills), (1, 0));
    assert_eq!(out.clusters[0].handle, 1);
    assert_eq!(out.clusters[0].members, vec![0, 1]);

    let g = gen("path:n=16", 0);
    let ids = IdAssignment::sequential(16);
    let s: Vec<usize> = (0..16).collect();
    let (out, _) = carve_rg_baseline(&g, &ids, &s, logical(16)).unwrap();
    assert!(out.kills <= 8);
    let d = decompose_rg(&g, &ids, logical(16)).unwrap();
    assert_valid(&g, &d);
}

#[test]
fn slow_id_examples() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let ids = IdAssignment::sequential(2);
    let (out, _) = carve_id_independent_slow(&g, &ids, &[0, 1], logical(16)).unwrap();
    assert_eq!(out.survivors.len() + out.kills, 2);
    assert_eq!(out.clusters.len(), 1);

    let g = Graph::new(3, [(0, 1)]).unwrap();
    let (out, _) = carve_id_independent_slow(&g, &IdAssignment::sequential(3), &[0, 1, 2], logical(16)).unwrap();
    assert!(out.survivors.contains(&2));
    assert!(out.clusters.iter().any(|c| c.members == vec![2]));

    let g = gen("cycle:n=32", 0);
    let d = decompose_slow_id_independent(&g, &IdAssignment::sequential(32), logical(32)).unwrap();
    assert_valid(&g, &d);
    assert_eq!(d.params.phases, id_free_b(32));
}

#[test]
fn id_free_parameters() {
    assert_eq!(log43_ceil(1), 0);
    assert_eq!(log43_ceil(2), 3);
    // (4/3)^21 ≈ 420.4 < 512 ≤ (4/3)^22 ≈ 560.5
    assert_eq!(log43_ceil(512), 22);
    assert_eq!(id_free_b(512), 23);
    let p = params_for(Variant::FastId, 512, 64);
    assert_eq!((p.b, p.l), (23, 32));
    assert_eq!(p, params_for(Variant::FastId, 512, 10));
}

#[test]
fn fast_id_single_node_ignores_width() {
    let g = Graph::empty(1);
    let narrow = IdAssignment::new(10, vec![0]).unwrap();
    let wide = IdAssignment::new(60, vec![0]).unwrap();
    let a = decompose_fast_id_independent(&g, &narrow, logical(64)).unwrap();
    let b = decompose_fast_id_independent(&g, &wide, logical(64)).unwrap();
    assert_eq!(a.color, b.color);
    assert_eq!(a.clusters, b.clusters);
    assert_eq!(a.carves[0].trace, b.carves[0].trace);
}

#[test]
fn fast_id_k2_wide_ids() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let narrow = IdAssignment::new(2, vec![1, 2]).unwrap();
    let wide = IdAssignment::new(60, vec![1, 2]).unwrap();
    let a = decompose_fast_id_independent(&g, &narrow, logical(64)).unwrap();
    let b = decompose_fast_id_independent(&g, &wide, logical(64)).unwrap();
    assert_eq!((a.color.clone(), a.cluster_of.clone()), (b.color.clone(), b.cluster_of.clone()));
    assert_eq!(max_weak_diameter(&g, &a), max_weak_diameter(&g, &b));
}

#[test]
fn fast_id_gnp_widths_agree() {
    let g = gen("gnp:n=512,p=0.02", 1);
    let base = IdAssignment::sequential(g.n());
    let runs: Vec<Decomposition> = [10, 64]
        .into_iter()
        .map(|b| decompose_fast_id_independent(&g, &base.with_width(b).unwrap(), logical(64)).unwrap())
        .collect();
    for d in &runs {
        assert_valid(&g, d);
        assert!(max_weak_diameter(&g, d) <= bound_112(&d.params));
    }
    assert_eq!(runs[0].colors(), runs[1].colors());
    assert_eq!(max_weak_diameter(&g, &runs[0]), max_weak_diameter(&g, &runs[1]));
    assert_eq!(runs[0].kills(), runs[1].kills());
}

#[test]
fn text_roundtrip() {
    let g = gen("grid:rows=6,cols=7", 0);
    for v in Variant::ALL {
        let mut d = decompose(&g, &IdAssignment::sequential(g.n()), logical(32), v).unwrap();
        d.seed = 9;
        let text = d.to_text();
        let back = Decomposition::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text, "{}", v.name());
        assert_eq!((back.variant, back.seed, back.params), (v, 9, d.params));
    }
}

#[test]
fn text_errors() {
    assert!(matches!(Decomposition::from_text(""), Err(DecompError::Parse { .. })));
    let g = gen("path:n=4", 0);
    let text = decompose_fast(&g, &IdAssignment::sequential(4), logical(16)).unwrap().to_text();
    let truncated: String = text.lines().filter(|l| *l != "end").map(|l| format!("{l}\n")).collect();
    assert!(Decomposition::from_text(&truncated).is_err());
    let bad = text.replace("variant fast", "variant slow");
    assert!(matches!(Decomposition::from_text(&bad), Err(DecompError::Parse { line: 2, .. })));
}

#[test]
fn modes_agree_on_small_graphs() {
    for (spec, seed) in [("gnp:n=40,p=0.1", 3), ("grid:rows=5,cols=5", 0), ("tree:n=30", 2)] {
        let g = gen(spec, seed);
        let ids = IdAssignment::sequential(g.n());
        for v in [Variant::Fast, Variant::Rg, Variant::SlowId] {
            let lo = decompose(&g, &ids, logical(16), v).unwrap();
            let fa = decompose(&g, &ids, ModelConfig::new(Some(16), Mode::Faithful).unwrap(), v).unwrap();
            assert_eq!(lo.to_text().lines().filter(|l| !l.starts_with("stat")).collect::<Vec<_>>(),
                fa.to_text().lines().filter(|l| !l.starts_with("stat")).collect::<Vec<_>>(), "{spec} {}", v.name());
            for (a, b) in lo.carves.iter().zip(&fa.carves) {
                assert_eq!(a.trace, b.trace);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_variant_is_valid(n in 2usize..80, p in 0.0f64..0.2, seed in 0u64..1000, which in 0usize..4) {
        let g = generate(&GraphSpec::parse(&format!("gnp:n={n},p={p}"), seed).unwrap()).unwrap();
        let v = Variant::ALL[which];
        let d = decompose(&g, &IdAssignment::sequential(n), logical(32), v).unwrap();
        assert_valid(&g, &d);
        if matches!(v, Variant::Fast | Variant::FastId) {
            prop_assert!(max_weak_diameter(&g, &d) <= bound_112(&d.params));
            prop_assert!(d.max_overlap() <= 6 * d.params.l as usize + 2);
        }
        for c in &d.carves {
            prop_assert!(2 * c.survivors >= c.s_len);
        }
    }
}
