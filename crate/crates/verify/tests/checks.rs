use congest_sim::{Mode, ModelConfig};
use decomposition::{decompose, decompose_fast, Variant};
use graph_core::{generate, Graph, GraphSpec, IdAssignment};
use proptest::prelude::*;
use verify::*;

fn logical() -> ModelConfig {
    ModelConfig::new(Some(32), Mode::Logical).unwrap()
}

fn path_tree(nodes: std::ops::Range<usize>, terminal: impl Fn(usize) -> bool) -> Vec<TreeLine> {
    let start = nodes.start;
    nodes.map(|v| TreeLine { node: v, parent: (v > start).then(|| v - 1), terminal: terminal(v) }).collect()
}

fn single(v: usize) -> Vec<TreeLine> {
    vec![TreeLine { node: v, parent: None, terminal: true }]
}

#[test]
fn k2_decomposition_passes() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let d = decompose_fast(&g, &IdAssignment::sequential(2), logical()).unwrap();
    let rec = parse_decomposition(&d.to_text()).unwrap();
    let rep = check_decomposition(&g, &rec, &Bounds::for_record(&rec));
    assert!(rep.ok(), "{}", rep.to_kv());
    assert_eq!(rep.measured("colors"), Some("1"));
}

#[test]
fn adjacent_same_color_clusters_fail() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let rec = DecompRecord::from_parts(vec![1, 1], vec![0, 1], vec![single(0), single(1)]);
    let rep = check_decomposition(&g, &rec, &Bounds::none());
    assert!(rep.failed("non_adjacency"));
    assert!(rep.get("non_adjacency").unwrap().witness.as_ref().unwrap().contains("edge 0-1"));
    let ok = DecompRecord::from_parts(vec![1, 2], vec![0, 1], vec![single(0), single(1)]);
    assert!(check_decomposition(&g, &ok, &Bounds::none()).ok());
}

#[test]
fn distance_nine_exceeds_eight() {
    let g = generate(&GraphSpec::parse("path:n=10", 0).unwrap()).unwrap();
    let mut color = vec![2; 10];
    let mut cluster_of: Vec<usize> = (0..10).collect();
    let mut trees: Vec<Vec<TreeLine>> = (0..10).map(single).collect();
    color[0] = 1;
    color[9] = 1;
    cluster_of[9] = 0;
    trees[0] = path_tree(0..10, |v| v == 0 || v == 9);
    // Clusters 1..=8 of color 2 are adjacent to each other; give them alternating colors 2 and 3.
    for v in 1..9 {
        color[v] = 2 + (v as u32 % 2);
    }
    trees.truncate(9);
    let rec = DecompRecord::from_parts(color, cluster_of, trees);
    let tight = Bounds { diameter: Some(8), ..Bounds::none() };
    let rep = check_decomposition(&g, &rec, &tight);
    assert!(rep.failed("weak_diameter"), "{}", rep.to_kv());
    let loose = Bounds { diameter: Some(9), ..Bounds::none() };
    let rep = check_decomposition(&g, &rec, &loose);
    assert!(rep.ok(), "{}", rep.to_kv());
    assert_eq!(rep.measured("max_weak_diameter"), Some("9"));
    assert_eq!(rep.measured("max_overlap"), Some("1"));
}

#[test]
fn broken_trees_and_coverage() {
    let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    // Tree edge 0-2 is not in G.
    let bad_edge = vec![TreeLine { node: 0, parent: None, terminal: true }, TreeLine { node: 2, parent: Some(0), terminal: true }];
    let rec = DecompRecord::from_parts(vec![1, 2, 1], vec![0, 1, 0], vec![bad_edge, single(1)]);
    assert!(check_decomposition(&g, &rec, &Bounds::none()).failed("steiner"));
    // Terminal set differs from the member set.
    let rec = DecompRecord::from_parts(vec![1, 2, 1], vec![0, 1, 0], vec![path_tree(0..3, |v| v == 0), single(1)]);
    assert!(check_decomposition(&g, &rec, &Bounds::none()).failed("steiner"));
    let rec = DecompRecord::from_parts(vec![1, 0, 1], vec![0, 1, 0], vec![path_tree(0..3, |v| v != 1), single(1)]);
    assert!(check_decomposition(&g, &rec, &Bounds::none()).failed("coverage"));
    let rec = DecompRecord::from_parts(vec![1, 1], vec![0, 0], vec![path_tree(0..2, |_| true)]);
    assert!(check_decomposition(&g, &rec, &Bounds::none()).failed("format"));
}

#[test]
fn record_format_errors() {
    assert!(parse_decomposition("").is_err());
    assert!(parse_decomposition("decomposition v1\nvariant fast n=1 b=1 seed=0\n").is_err());
    let text = "decomposition v1\nvariant fast n=1 b=1 seed=0\nparams b=1 L=1 phases=2 steps=28 radius=0\nc 0 1 0\nt 0 0 - 1\nend\n";
    let rec = parse_decomposition(text).unwrap();
    assert_eq!((rec.n, rec.colors(), rec.l), (1, 1, 1));
    let e = parse_decomposition(&text.replace("c 0 1 0", "c 3 1 0")).unwrap_err();
    assert_eq!(e.line, 4);
}

#[test]
fn k2_trace_passes_and_faults_are_named() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let d = decompose_fast(&g, &IdAssignment::sequential(2), logical()).unwrap();
    let trace = d.carves[0].trace.as_str();
    let rep = check_carve_trace(trace);
    assert!(rep.ok(), "{}", rep.to_kv());

    let g = generate(&GraphSpec::parse("gnp:n=120,p=0.04", 5).unwrap()).unwrap();
    let d = decompose_fast(&g, &IdAssignment::sequential(g.n()), logical()).unwrap();
    let trace = d.carves[0].trace.as_str();
    assert!(check_carve_trace(trace).ok());
    let forged = forge_token_drop(trace).unwrap();
    let rep = check_carve_trace(&forged);
    assert!(rep.failed("invariant1"));
    assert!(rep.get("invariant1").unwrap().witness.as_ref().unwrap().starts_with("phase "));
    assert!(check_carve_trace(&forge_potential_drop(trace).unwrap()).failed("invariant2"));
    assert!(check_carve_trace(&forge_unfinished(trace).unwrap()).failed("finished"));
}

#[test]
fn malformed_traces() {
    assert!(check_carve_trace("").failed("format"));
    assert!(check_carve_trace("carve v1\nvariant nope\nparams n=1 b=1 L=1 phases=2 steps=28 accept=28 kill=14\nend\n").failed("format"));
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let d = decompose_fast(&g, &IdAssignment::sequential(2), logical()).unwrap();
    let cut: String = d.carves[0].trace.lines().take_while(|l| *l != "end").map(|l| format!("{l}\n")).collect();
    assert!(check_carve_trace(&cut).failed("format"));
}

#[test]
fn slow_variant_contracts_on_a_cycle() {
    let g = generate(&GraphSpec::parse("cycle:n=32", 0).unwrap()).unwrap();
    let d = decompose(&g, &IdAssignment::sequential(32), logical(), Variant::SlowId).unwrap();
    for c in &d.carves {
        let rep = check_carve_trace(c.trace.as_str());
        assert!(rep.passed("contraction") && rep.ok(), "{}", rep.to_kv());
    }
    let rg = decompose(&g, &IdAssignment::sequential(32), logical(), Variant::Rg).unwrap();
    assert!(check_carve_trace(rg.carves[0].trace.as_str()).passed("bits"));
}

#[test]
fn balance_examples() {
    use Side::*;
    assert!(check_balance(&[Red, Blue], None, (3, 4)).ok());
    assert!(!check_balance(&[Blue; 4], None, (3, 4)).ok());
    assert!(check_balance(&[Blue, Blue, Blue, Red], None, (3, 4)).ok());
    // Components of one entity are exempt; others are judged separately.
    let comps = [0, 0, 1, 2, 2, 2, 2];
    let rep = check_balance(&[Red, Blue, Red, Blue, Blue, Blue, Blue], Some(&comps), (3, 4));
    assert!(rep.failed("per_component"));
    assert_eq!(rep.measured("max_class"), Some("4"));
    assert!(check_balance(&[Red, Blue, Red, Red, Blue, Blue, Blue], Some(&comps), (3, 4)).ok());
    let floor = check_balance_with(&[Blue, Blue, Blue, Red, Red], None, |k| 3 * k / 4);
    assert!(floor.ok());
    assert!(!check_balance_with(&[Blue, Blue, Blue, Blue, Red], None, |k| 3 * k / 4).ok());
    assert_eq!(Side::parse('u'), Some(Uncolored));
}

#[test]
fn mis_and_coloring_checks() {
    let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    assert!(check_mis(&k3, &[false, true, false]).ok());
    assert!(check_mis(&k3, &[true, true, false]).failed("independent"));
    assert!(check_mis(&k3, &[false, false, false]).failed("maximal"));
    assert_eq!(brute_force_maximal_sets(&k3), vec![0b001, 0b010, 0b100]);
    assert!(check_coloring(&k3, &[1, 2, 3], 3).ok());
    assert!(check_coloring(&k3, &[1, 2, 1], 3).failed("proper"));
    assert!(check_coloring(&k3, &[1, 2, 4], 3).failed("palette"));
    assert_eq!(parse_mis("m 1\n", 3).unwrap(), vec![false, true, false]);
    assert!(parse_mis("m 1\nm 1\n", 3).is_err());
    assert_eq!(parse_coloring("col 0 1\ncol 1 2\ncol 2 3\n", 3).unwrap(), vec![1, 2, 3]);
    assert_eq!(parse_coloring("col 0 1\ncol 2 3\n", 3).unwrap_err().msg, "node 1 has no color");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Measured weak diameters and non-adjacency agree with exhaustive all-pairs distances.
    #[test]
    fn matches_brute_force(n in 1usize..=10, p in 0.0f64..0.6, seed in 0u64..500, which in 0usize..4) {
        let g = generate(&GraphSpec::parse(&format!("gnp:n={n},p={p}"), seed).unwrap()).unwrap();
        let d = decompose(&g, &IdAssignment::sequential(n), logical(), Variant::ALL[which]).unwrap();
        let rec = parse_decomposition(&d.to_text()).unwrap();
        let rep = check_decomposition(&g, &rec, &Bounds::for_record(&rec));
        prop_assert!(rep.ok(), "{}", rep.to_kv());
        let dist = all_pairs_distances(&g);
        let brute = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| rec.cluster_of[u] == rec.cluster_of[v])
            .map(|(u, v)| dist[u][v])
            .max()
            .unwrap();
        prop_assert_eq!(rep.measured("max_weak_diameter").unwrap(), brute.to_string());
        let clash = g.edges().any(|(u, v)| rec.color[u] == rec.color[v] && rec.cluster_of[u] != rec.cluster_of[v]);
        prop_assert!(!clash);
        for c in &d.carves {
            let r = check_carve_trace(c.trace.as_str());
            prop_assert!(r.ok(), "{}", r.to_kv());
        }
    }
}
