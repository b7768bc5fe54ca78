use graph_core::{
    assign_ids, generate, load_graph, load_ids, parse_graph, save_graph, save_ids, write_graph, Family, Graph,
    GraphSpec, IdScheme,
};
use proptest::prelude::*;

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..120).prop_map(move |pairs| {
            let edges: std::collections::BTreeSet<(usize, usize)> =
                pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            Graph::new(n, edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn text_roundtrip(g in arb_graph()) {
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn adjacency_matches_edges(g in arb_graph()) {
        let degree_sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.m());
        for v in 0..g.n() {
            prop_assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
            for &u in g.neighbors(v) {
                prop_assert!(g.has_edge(u, v));
            }
        }
    }

    #[test]
    fn generation_is_deterministic(n in 1usize..80, p in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = GraphSpec::new(Family::Gnp { n, p }, seed);
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let tree = GraphSpec::new(Family::Tree { n }, seed);
        prop_assert_eq!(generate(&tree).unwrap(), generate(&tree).unwrap());
    }
}

#[test]
fn file_roundtrip_with_ids() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(&GraphSpec::parse("gnp:n=30,p=0.2", 4).unwrap()).unwrap();
    let ids = assign_ids(&g, 12, IdScheme::Shuffled(3)).unwrap();
    let gp = dir.path().join("g.txt");
    let ip = dir.path().join("g.ids");
    save_graph(&g, &gp).unwrap();
    save_ids(&ids, &ip).unwrap();
    assert_eq!(load_graph(&gp).unwrap(), g);
    assert_eq!(load_ids(&ip, g.n()).unwrap(), ids);
    let via_spec = generate(&GraphSpec::new(Family::File { path: gp }, 0)).unwrap();
    assert_eq!(via_spec, g);
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_graph("/nonexistent/graph.txt"), Err(graph_core::GraphError::Io { .. })));
}
