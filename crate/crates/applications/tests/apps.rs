use applications::*;
use congest_sim::{Mode, ModelConfig};
use decomposition::{decompose, decompose_fast, Decomposition, Variant};
use graph_core::{generate, Graph, GraphSpec, IdAssignment};
use proptest::prelude::*;
use verify::{brute_force_maximal_sets, check_coloring, check_mis, parse_coloring, parse_mis};

fn logical() -> ModelConfig {
    ModelConfig::new(Some(32), Mode::Logical).unwrap()
}

fn gen(spec: &str, seed: u64) -> Graph {
    generate(&GraphSpec::parse(spec, seed).unwrap()).unwrap()
}

fn fast(g: &Graph, ids: &IdAssignment) -> Decomposition {
    decompose_fast(g, ids, logical()).unwrap()
}

#[test]
fn edgeless_selects_everyone() {
    let g = Graph::empty(5);
    let ids = IdAssignment::sequential(5);
    let r = mis_via_decomposition(&g, &ids, &fast(&g, &ids), logical()).unwrap();
    assert_eq!(r.size(), 5);
}

#[test]
fn triangle() {
    let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let ids = IdAssignment::sequential(3);
    let d = fast(&g, &ids);
    let r = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
    assert_eq!(r.size(), 1);
    let c = coloring_via_decomposition(&g, &ids, &d, 2, logical()).unwrap();
    assert!(check_coloring(&g, &c.colors, 3).ok());
    assert_eq!(c.colors_used(), 3);
    assert!(matches!(
        coloring_via_decomposition(&g, &ids, &d, 1, logical()),
        Err(AppError::Delta { delta: 1, max_degree: 2 })
    ));
}

#[test]
fn star_center_differs_from_leaves() {
    let g = gen("star:n=9", 0);
    let ids = IdAssignment::sequential(9);
    let c = coloring_via_decomposition(&g, &ids, &fast(&g, &ids), 8, logical()).unwrap();
    assert!(check_coloring(&g, &c.colors, 9).ok());
    let center = (0..9).find(|&v| g.degree(v) == 8).unwrap();
    assert!((0..9).filter(|&v| v != center).all(|v| c.colors[v] != c.colors[center]));
}

#[test]
fn grid_uses_at_most_five_colors() {
    let g = gen("grid:rows=8,cols=8", 0);
    let ids = IdAssignment::sequential(64);
    let c = coloring_via_decomposition(&g, &ids, &fast(&g, &ids), 4, logical()).unwrap();
    let rep = check_coloring(&g, &c.colors, 5);
    assert!(rep.ok(), "{}", rep.to_kv());
    assert!(c.colors_used() <= 5);
}

#[test]
fn gnp_512_mis_passes_checker() {
    let g = gen("gnp:n=512,p=0.05", 2);
    let ids = IdAssignment::sequential(512);
    let d = fast(&g, &ids);
    let r = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
    let rep = check_mis(&g, &r.selected);
    assert!(rep.ok(), "{}", rep.to_kv());
    assert!(r.rounds > 0);
    let c = coloring_via_decomposition(&g, &ids, &d, g.max_degree(), logical()).unwrap();
    assert!(check_coloring(&g, &c.colors, g.max_degree() as u32 + 1).ok());
}

#[test]
fn modes_agree() {
    for (spec, seed) in [("gnp:n=60,p=0.08", 1), ("grid:rows=5,cols=6", 0)] {
        let g = gen(spec, seed);
        let ids = IdAssignment::sequential(g.n());
        let d = fast(&g, &ids);
        let faithful = ModelConfig::new(Some(32), Mode::Faithful).unwrap();
        let a = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
        let b = mis_via_decomposition(&g, &ids, &d, faithful).unwrap();
        assert_eq!((a.selected, a.rounds), (b.selected, b.rounds), "{spec}");
        let delta = g.max_degree();
        let a = coloring_via_decomposition(&g, &ids, &d, delta, logical()).unwrap();
        let b = coloring_via_decomposition(&g, &ids, &d, delta, faithful).unwrap();
        assert_eq!((a.colors, a.rounds), (b.colors, b.rounds), "{spec}");
    }
}

#[test]
fn wide_identifiers_and_local_model() {
    let g = gen("gnp:n=80,p=0.06", 4);
    let ids = IdAssignment::sequential(80).with_width(60).unwrap();
    let d = decompose(&g, &ids, logical(), Variant::FastId).unwrap();
    let local = ModelConfig::local(Mode::Faithful);
    let r = mis_via_decomposition(&g, &ids, &d, local).unwrap();
    assert!(check_mis(&g, &r.selected).ok());
    let c = coloring_via_decomposition(&g, &ids, &d, g.max_degree() + 3, local).unwrap();
    assert!(check_coloring(&g, &c.colors, g.max_degree() as u32 + 4).ok());
}

#[test]
fn greedy_follows_identifier_order() {
    // One cluster over the path 0-1-2: ascending ids pick the middle first
    // when it carries the smallest id.
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let ids = IdAssignment::new(2, vec![2, 0, 1]).unwrap();
    let d = fast(&g, &ids);
    assert_eq!(d.colors(), 1);
    let r = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
    assert_eq!(r.selected, vec![false, true, false]);
}

#[test]
fn invalid_decomposition_is_rejected() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let ids = IdAssignment::sequential(2);
    let d = fast(&g, &ids);
    let other = Graph::empty(3);
    assert!(matches!(mis_via_decomposition(&other, &IdAssignment::sequential(3), &d, logical()), Err(AppError::Shape(_))));
    let split = fast(&Graph::empty(2), &ids);
    assert!(matches!(mis_via_decomposition(&g, &ids, &split, logical()), Err(AppError::Invalid(w)) if w.starts_with("non_adjacency")));
}

#[test]
fn text_roundtrip() {
    let g = gen("cycle:n=7", 0);
    let ids = IdAssignment::sequential(7);
    let d = fast(&g, &ids);
    let r = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
    assert_eq!(parse_mis(&r.to_text(), 7).unwrap(), r.selected);
    let c = coloring_via_decomposition(&g, &ids, &d, 2, logical()).unwrap();
    assert_eq!(parse_coloring(&c.to_text(), 7).unwrap(), c.colors);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Small graphs: the output is one of the exhaustively enumerated maximal
    /// independent sets, and the coloring is proper.
    #[test]
    fn matches_brute_force(n in 1usize..=10, p in 0.0f64..0.7, seed in 0u64..1000, which in 0usize..4) {
        let g = gen(&format!("gnp:n={n},p={p}"), seed);
        let ids = IdAssignment::sequential(n);
        let d = decompose(&g, &ids, logical(), Variant::ALL[which]).unwrap();
        let r = mis_via_decomposition(&g, &ids, &d, logical()).unwrap();
        let mask = r.nodes().fold(0u32, |m, v| m | 1 << v);
        prop_assert!(brute_force_maximal_sets(&g).contains(&mask));
        let c = coloring_via_decomposition(&g, &ids, &d, g.max_degree(), logical()).unwrap();
        prop_assert!(check_coloring(&g, &c.colors, g.max_degree() as u32 + 1).ok());
    }
}
