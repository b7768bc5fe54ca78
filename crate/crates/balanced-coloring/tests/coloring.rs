use balanced_coloring::*;
use congest_sim::{Mode, ModelConfig, Session};
use graph_core::{generate, Graph, GraphSpec, IdAssignment};
use proptest::prelude::*;
use tree_aggregation::RootedTree;

fn local() -> ModelConfig {
    ModelConfig::local(Mode::Logical)
}

fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect()
}

fn direct_mis(g: &Graph, cfg: ModelConfig) -> MisOutcome {
    let ids = IdAssignment::sequential(g.n());
    let mut sess = Session::new(g, &ids, cfg);
    linial_mis(&mut sess, &adjacency(g), ids.ids(), ids.b(), &mut DirectNet).unwrap()
}

fn is_mis(adj: &[Vec<usize>], set: &[bool]) -> bool {
    (0..adj.len()).all(|v| {
        let hit = adj[v].iter().any(|&u| set[u]);
        if set[v] { !hit } else { hit }
    })
}

#[test]
fn mis_small_cases() {
    let one = direct_mis(&Graph::empty(1), local());
    assert_eq!(one.in_set, vec![true]);
    let k2 = direct_mis(&Graph::new(2, [(0, 1)]).unwrap(), local());
    assert_eq!(k2.in_set.iter().filter(|&&x| x).count(), 1);
    let p5 = Graph::new(5, (1..5).map(|v| (v - 1, v))).unwrap();
    let out = direct_mis(&p5, local());
    assert!(is_mis(&adjacency(&p5), &out.in_set));
    // One LOCAL round per virtual round.
    assert_eq!(out.announces, mis_announces(MAX_VIRTUAL_DEGREE));
    assert_eq!(out.rounds, out.announces);
    assert!(out.colors.iter().all(|&c| c <= MAX_VIRTUAL_DEGREE as u64));
}

#[test]
fn mis_modes_agree() {
    let g = generate(&GraphSpec::parse("gnp:n=30,p=0.15", 4).unwrap()).unwrap();
    let a = direct_mis(&g, ModelConfig::new(Some(8), Mode::Logical).unwrap());
    let b = direct_mis(&g, ModelConfig::new(Some(8), Mode::Faithful).unwrap());
    assert_eq!(a, b);
    assert!(is_mis(&adjacency(&g), &a.in_set));
}

#[test]
fn mis_rejects_high_degree() {
    let g = generate(&GraphSpec::parse("star:n=123", 0).unwrap()).unwrap();
    let ids = IdAssignment::sequential(g.n());
    let mut sess = Session::new(&g, &ids, local());
    let err = linial_mis(&mut sess, &adjacency(&g), ids.ids(), ids.b(), &mut DirectNet).unwrap_err();
    assert!(matches!(err, ColorError::Degree { entity: 0, degree: 122, .. }));
}

fn color_nodes(g: &Graph, ids: &IdAssignment, cfg: ModelConfig) -> NodeColoring {
    let mut sess = Session::new(g, ids, cfg);
    balanced_color_nodes(&mut sess).unwrap()
}

#[test]
fn star_is_split_by_its_center() {
    let g = generate(&GraphSpec::parse("star:n=13", 0).unwrap()).unwrap();
    let out = color_nodes(&g, &IdAssignment::sequential(13), local());
    assert!(out.choice.heavy[0]);
    assert_eq!(out.choice.in_degree[0], 12);
    assert_eq!(out.coloring.count(Color::Blue), 7);
    assert_eq!(out.coloring.count(Color::Red), 6);
    assert!(out.coloring.max_class() <= 9);
}

#[test]
fn small_graphs() {
    let k2 = Graph::new(2, [(0, 1)]).unwrap();
    let out = color_nodes(&k2, &IdAssignment::sequential(2), local());
    assert_eq!((out.coloring.count(Color::Red), out.coloring.count(Color::Blue)), (1, 1));
    let c4 = generate(&GraphSpec::parse("cycle:n=4", 0).unwrap()).unwrap();
    let out = color_nodes(&c4, &IdAssignment::sequential(4), local());
    assert!(out.coloring.max_class() <= 3);
    assert_eq!(out.coloring.count(Color::Uncolored), 0);
}

#[test]
fn isolated_node_is_rejected() {
    let g = Graph::new(3, [(0, 1)]).unwrap();
    let ids = IdAssignment::sequential(3);
    let mut sess = Session::new(&g, &ids, local());
    assert!(matches!(balanced_color_nodes(&mut sess), Err(ColorError::Precondition(_))));
}

#[test]
fn rounds_ignore_width_and_size() {
    let mut seen = Vec::new();
    for n in [256usize, 4096] {
        let g = generate(&GraphSpec::parse(&format!("cycle:n={n}"), 0).unwrap()).unwrap();
        for b in [16, 64] {
            let ids = IdAssignment::sequential(n).with_width(b).unwrap();
            seen.push(color_nodes(&g, &ids, local()).rounds);
        }
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]), "{seen:?}");
}

/// Random graph with every node given at least one neighbor.
fn min_degree_one(n: usize, p: f64, seed: u64) -> Graph {
    let g = generate(&GraphSpec::parse(&format!("gnp:n={n},p={p}"), seed).unwrap()).unwrap();
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    for v in (0..n).filter(|&v| g.degree(v) == 0) {
        let u = if v == 0 { 1 } else { v - 1 };
        edges.push((u.min(v), u.max(v)));
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::new(n, edges).unwrap()
}

fn check_structure(g: &Graph, out: &NodeColoring) {
    let n = g.n();
    assert!(out.coloring.max_class() <= n * 3 / 4);
    assert_eq!(out.coloring.count(Color::Uncolored), 0);
    assert!(out.choice.heavy.iter().filter(|&&h| h).count() * 10 <= n);
    let light = out.choice.light_graph();
    let mut size = vec![0usize; n];
    for v in 0..n {
        size[out.center[v]] += 1;
        if !light[v].is_empty() {
            assert!(!out.choice.heavy[out.center[v]]);
        }
    }
    for v in (0..n).filter(|&v| !light[v].is_empty()) {
        assert!(size[out.center[v]] >= 2, "H' cluster of {v} is a singleton");
    }
    for v in 0..n {
        for &u in &light[v] {
            assert!(!(out.mis[u] && out.mis[v]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn node_lemma_balance(n in 2usize..300, avg in 1.0f64..6.0, seed in 0u64..1000) {
        let g = min_degree_one(n, (avg / n as f64).min(1.0), seed);
        let ids = graph_core::assign_ids(&g, graph_core::default_id_bits(n), graph_core::IdScheme::Shuffled(seed)).unwrap();
        let out = color_nodes(&g, &ids, local());
        check_structure(&g, &out);
    }

    #[test]
    fn node_lemma_modes_agree(n in 2usize..24, seed in 0u64..100, bw in prop::option::of(4u32..40)) {
        let g = min_degree_one(n, 0.2, seed);
        let ids = IdAssignment::sequential(n);
        let a = color_nodes(&g, &ids, ModelConfig::new(bw, Mode::Logical).unwrap());
        let b = color_nodes(&g, &ids, ModelConfig::new(bw, Mode::Faithful).unwrap());
        prop_assert_eq!(a, b);
    }
}

fn path_tree(nodes: &[usize]) -> RootedTree {
    let mut t = RootedTree::new(nodes[0], true);
    for w in nodes.windows(2) {
        t.add_child(w[1], w[0], true).unwrap();
    }
    t
}

fn color_clusters(g: &Graph, owner: Vec<Option<usize>>, trees: &[RootedTree], ids: Vec<u64>) -> Result<ClusterColoring, ColorError> {
    let node_ids = IdAssignment::sequential(g.n());
    let mut sess = Session::new(g, &node_ids, ModelConfig::new(Some(32), Mode::Logical).unwrap());
    let scope = ClusterScope { owner, trees: trees.iter().collect(), ids, id_bits: 8 };
    balanced_color_clusters(&mut sess, &scope)
}

#[test]
fn two_singletons() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let trees = [RootedTree::new(0, true), RootedTree::new(1, true)];
    let out = color_clusters(&g, vec![Some(0), Some(1)], &trees, vec![5, 9]).unwrap();
    let mut got = out.coloring.colors.clone();
    got.sort_by_key(|c| format!("{c:?}"));
    assert_eq!(got, vec![Color::Blue, Color::Red]);
    assert!(out.rounds > 0);
}

#[test]
fn heavy_cluster_pairs_tokens() {
    // Cluster 0 is the path 0-1-2; twelve singleton clusters hang off it.
    let mut edges = vec![(0, 1), (1, 2)];
    for leaf in 3..15 {
        edges.push((1 + leaf % 2, leaf));
    }
    let g = Graph::new(15, edges).unwrap();
    let mut trees = vec![path_tree(&[0, 1, 2])];
    let mut owner = vec![Some(0); 3];
    for leaf in 3..15 {
        owner.push(Some(leaf - 2));
        trees.push(RootedTree::new(leaf, true));
    }
    let out = color_clusters(&g, owner, &trees, (0..13).collect()).unwrap();
    assert!(out.choice.heavy[0]);
    assert_eq!(out.coloring.count(Color::Blue), 7);
    assert_eq!(out.coloring.count(Color::Red), 6);
}

#[test]
fn light_path_of_clusters() {
    // Four two-node clusters along a path of eight nodes.
    let g = generate(&GraphSpec::parse("path:n=8", 0).unwrap()).unwrap();
    let trees: Vec<RootedTree> = (0..4).map(|c| path_tree(&[2 * c, 2 * c + 1])).collect();
    let owner = (0..8).map(|v| Some(v / 2)).collect();
    let out = color_clusters(&g, owner, &trees, vec![3, 1, 0, 2]).unwrap();
    assert!(out.coloring.max_class() <= 3);
    assert_eq!(out.coloring.count(Color::Uncolored), 0);
}

#[test]
fn isolated_cluster_is_rejected() {
    let g = Graph::new(3, [(0, 1)]).unwrap();
    let trees = [RootedTree::new(0, true), RootedTree::new(1, true), RootedTree::new(2, true)];
    let err = color_clusters(&g, vec![Some(0), Some(1), Some(2)], &trees, vec![0, 1, 2]).unwrap_err();
    assert!(matches!(err, ColorError::Precondition(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    /// Clusters are the parts of a random partition of a random graph into
    /// connected pieces grown from seeds.
    #[test]
    fn cluster_lemma_balance(n in 4usize..200, seed in 0u64..500, k in 2usize..40) {
        let g = min_degree_one(n, (3.0 / n as f64).min(1.0), seed);
        let k = k.min(n);
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut trees: Vec<RootedTree> = Vec::new();
        for c in 0..k {
            let root = (c * 7919 + seed as usize) % n;
            if owner[root].is_none() {
                owner[root] = Some(trees.len());
                trees.push(RootedTree::new(root, true));
            }
        }
        let mut frontier: Vec<usize> = trees.iter().map(|t| t.root()).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in g.neighbors(x) {
                    if owner[y].is_none() {
                        let c = owner[x].unwrap();
                        owner[y] = Some(c);
                        trees[c].add_child(y, x, true).unwrap();
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        // Keep only clusters that touch another cluster.
        let probe = ClusterScope { owner: owner.clone(), trees: trees.iter().collect(), ids: (0..trees.len() as u64).collect(), id_bits: 8 };
        let adj = probe.cluster_graph(&g);
        let keep: Vec<usize> = (0..trees.len()).filter(|&c| !adj[c].is_empty()).collect();
        prop_assume!(!keep.is_empty());
        let mut index = vec![usize::MAX; trees.len()];
        for (j, &c) in keep.iter().enumerate() {
            index[c] = j;
        }
        let owner2 = owner.iter().map(|o| o.map(|c| index[c]).filter(|&j| j != usize::MAX)).collect();
        let trees2: Vec<RootedTree> = keep.iter().map(|&c| trees[c].clone()).collect();
        let ids = keep.iter().map(|&c| ((c as u64) * 37 + seed) % 251).collect::<Vec<_>>();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assume!(sorted.len() == ids.len());
        let out = color_clusters(&g, owner2, &trees2, ids).unwrap();
        prop_assert_eq!(out.coloring.count(Color::Uncolored), 0);
        let comps = out.component.iter().max().unwrap() + 1;
        for c in 0..comps {
            let members: Vec<usize> = (0..keep.len()).filter(|&j| out.component[j] == c).collect();
            let blue = members.iter().filter(|&&j| out.coloring.colors[j] == Color::Blue).count();
            let red = members.len() - blue;
            prop_assert!(red.max(blue) <= members.len() * 3 / 4, "{} red {} blue", red, blue);
        }
    }
}

struct LevelCase {
    g: Graph,
    node_cluster: Vec<Option<usize>>,
    levels: Vec<u32>,
    trees: Vec<RootedTree>,
}

/// A path where node `v` is a singleton cluster at level `levels[v]`.
fn level_path(levels: &[u32]) -> LevelCase {
    let n = levels.len();
    LevelCase {
        g: Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap(),
        node_cluster: (0..n).map(Some).collect(),
        levels: levels.to_vec(),
        trees: (0..n).map(|v| RootedTree::new(v, true)).collect(),
    }
}

fn color_levels(case: &LevelCase, participants: &[usize], radius: u64, bw: Option<u32>) -> Result<LevelColoring, ColorError> {
    let ids = IdAssignment::sequential(case.g.n());
    let cluster_ids: Vec<u64> = (0..case.levels.len() as u64).collect();
    let mut sess = Session::new(&case.g, &ids, ModelConfig::new(bw, Mode::Logical).unwrap());
    let scope = LevelScope {
        node_cluster: &case.node_cluster,
        levels: &case.levels,
        trees: case.trees.iter().collect(),
        ids: &cluster_ids,
        id_bits: 8,
        participants,
        radius,
    };
    partial_color_levels(&mut sess, &scope)
}

#[test]
fn lone_cluster_stays_uncolored() {
    let case = level_path(&[2, 3, 3, 3]);
    let out = color_levels(&case, &[0], 10, None).unwrap();
    assert_eq!(out.colors, vec![Color::Uncolored]);
    assert_eq!(out.extended[0].region, vec![0, 1, 2, 3]);
}

#[test]
fn higher_levels_connect() {
    let case = level_path(&[2, 3, 4, 3, 2]);
    let out = color_levels(&case, &[0, 4], 10, Some(16)).unwrap();
    let mut got = out.colors.clone();
    got.sort_by_key(|c| format!("{c:?}"));
    assert_eq!(got, vec![Color::Blue, Color::Red]);
    // The middle node ties; the smaller source id wins it.
    assert_eq!(out.extended[0].region, vec![0, 1, 2]);
    assert_eq!(out.extended[1].region, vec![3, 4]);
    assert!(out.rounds >= 10);
}

#[test]
fn lower_levels_separate() {
    let case = level_path(&[2, 1, 2]);
    let out = color_levels(&case, &[0, 2], 10, None).unwrap();
    assert_eq!(out.colors, vec![Color::Uncolored, Color::Uncolored]);
}

#[test]
fn radius_limits_capture() {
    let case = level_path(&[2, 3, 3, 3, 3, 3, 2]);
    let out = color_levels(&case, &[0, 6], 2, None).unwrap();
    assert_eq!(out.colors, vec![Color::Uncolored, Color::Uncolored]);
    assert!(out.extended.iter().all(|e| e.reach <= 2));
    let wide = color_levels(&case, &[0, 6], 3, None).unwrap();
    assert!(wide.colors.iter().all(|&c| c != Color::Uncolored));
}

#[test]
fn levels_share_bandwidth() {
    let case = level_path(&[1, 2, 3]);
    assert!(color_levels(&case, &[0, 1, 2], 4, Some(2)).is_err());
    assert!(color_levels(&case, &[0, 1, 2], 4, Some(3)).is_ok());
}

#[test]
fn radius_formula() {
    assert_eq!(bfs_radius(256, 21), 2629 * 64);
    assert_eq!(bfs_radius(1, 1), 200 * 4);
}
