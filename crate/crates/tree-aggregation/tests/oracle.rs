use congest_sim::{Mode, ModelConfig, Session};
use graph_core::{Graph, IdAssignment};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tree_aggregation::*;

fn path_tree(nodes: &[usize]) -> RootedTree {
    let mut t = RootedTree::new(nodes[0], true);
    for w in nodes.windows(2) {
        t.add_child(w[1], w[0], true).unwrap();
    }
    t
}

fn star_tree(center: usize, leaves: &[usize]) -> RootedTree {
    let mut t = RootedTree::new(center, true);
    for &l in leaves {
        t.add_child(l, center, true).unwrap();
    }
    t
}

fn session<'g>(g: &'g Graph, ids: &'g IdAssignment, b: Option<u32>, mode: Mode) -> Session<'g> {
    Session::new(g, ids, ModelConfig { bandwidth: b, mode })
}

fn path_graph(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (v - 1, v))).unwrap()
}

#[test]
fn sum_examples() {
    let g = path_graph(3);
    let ids = IdAssignment::sequential(3);
    let t = path_tree(&[0, 1, 2]);
    let plan = plan_channels(&[&t], Some(1)).unwrap();
    let mut s = session(&g, &ids, Some(1), Mode::Faithful);
    let out = pipelined_sum(&mut s, "sum", &[&t], &[vec![1, 2, 4]], 3, &plan).unwrap();
    assert_eq!(out.per_tree, vec![7]);

    let single = RootedTree::new(0, true);
    let plan = plan_channels(&[&single], Some(1)).unwrap();
    let out = pipelined_sum(&mut s, "sum", &[&single], &[vec![5]], 3, &plan).unwrap();
    assert_eq!(out.per_tree, vec![5]);
    assert!(out.rounds <= 3 + C_0);

    // Star with three leaves, m = 2, b' = 1: M = 2 + ⌈log2 4⌉ + 1 = 5 chunks,
    // leaves send chunk k in round k, so the root is done after round 5.
    let g = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let ids = IdAssignment::sequential(4);
    let star = star_tree(0, &[1, 2, 3]);
    let plan = plan_channels(&[&star], Some(1)).unwrap();
    let mut s = session(&g, &ids, Some(1), Mode::Faithful);
    let out = pipelined_sum(&mut s, "sum", &[&star], &[vec![0, 1, 1, 1]], 2, &plan).unwrap();
    assert_eq!(out.per_tree, vec![3]);
    assert_eq!(out.rounds, 5);
    assert!(out.rounds <= 1 + 5 + C_0);
    assert_eq!(s.metrics().rounds_total, 5);

    assert!(matches!(
        pipelined_sum(&mut s, "sum", &[&star], &[vec![0, 4, 1, 1]], 2, &plan),
        Err(AggError::ValueTooLarge { value: 4, .. })
    ));
}

#[test]
fn min_examples() {
    let g = path_graph(3);
    let ids = IdAssignment::sequential(3);
    let t = path_tree(&[0, 1, 2]);
    let plan = plan_channels(&[&t], Some(2)).unwrap();
    for mode in [Mode::Faithful, Mode::Logical] {
        let mut s = session(&g, &ids, Some(2), mode);
        assert_eq!(pipelined_min(&mut s, "min", &[&t], &[vec![5, 3, 6]], 3, &plan).unwrap().per_tree, vec![3]);
        assert_eq!(pipelined_min(&mut s, "min", &[&t], &[vec![9, 9, 9]], 4, &plan).unwrap().per_tree, vec![9]);
    }
    let g = Graph::new(3, [(0, 1), (0, 2)]).unwrap();
    let ids = IdAssignment::sequential(3);
    let star = star_tree(0, &[1, 2]);
    let plan = plan_channels(&[&star], Some(1)).unwrap();
    let mut s = session(&g, &ids, Some(1), Mode::Faithful);
    let out = pipelined_min(&mut s, "min", &[&star], &[vec![0b11, 0b10, 0b01]], 2, &plan).unwrap();
    assert_eq!(out.per_tree, vec![0b01]);
    assert_eq!(out.rounds, 2);
}

#[test]
fn broadcast_examples() {
    let g = path_graph(3);
    let ids = IdAssignment::sequential(3);
    let t = path_tree(&[0, 1, 2]);
    let plan = plan_channels(&[&t], Some(4)).unwrap();
    let mut s = session(&g, &ids, Some(4), Mode::Faithful);
    let out = pipelined_broadcast(&mut s, "bc", &[&t], &[0b1011], 4, &plan).unwrap();
    assert_eq!(out.per_tree, vec![vec![0b1011; 3]]);
    assert!(out.rounds <= 3 + C_0);
    let out = pipelined_broadcast(&mut s, "bc", &[&t], &[0], 0, &plan).unwrap();
    assert_eq!(out.rounds, 0);

    // Ten trees stacked on one path share every edge: b' = 1.
    let g = path_graph(5);
    let ids = IdAssignment::sequential(5);
    let trees: Vec<RootedTree> = (0..10).map(|_| path_tree(&[0, 1, 2, 3, 4])).collect();
    let refs: Vec<&RootedTree> = trees.iter().collect();
    let plan = plan_channels(&refs, Some(10)).unwrap();
    assert_eq!(plan.per_tree, Some(1));
    let msgs: Vec<u64> = (0..10).collect();
    let mut s = session(&g, &ids, Some(10), Mode::Faithful);
    let out = pipelined_broadcast(&mut s, "bc", &refs, &msgs, 4, &plan).unwrap();
    for (t, got) in out.per_tree.iter().enumerate() {
        assert_eq!(got, &vec![t as u64; 5]);
    }
    assert_eq!(out.rounds, 4 - 1 + 4);
    assert_eq!(s.metrics().max_edge_bits, 10);
}

#[test]
fn convergecast_examples() {
    let g = path_graph(4);
    let ids = IdAssignment::sequential(4);
    let t = path_tree(&[0, 1, 2, 3]);
    let plan = plan_channels(&[&t], Some(3)).unwrap();
    let mut s = session(&g, &ids, Some(3), Mode::Faithful);
    let items = vec![vec![], vec![], vec![], vec![0b101101]];
    let out = pipelined_convergecast(&mut s, "cc", &[&t], &[items], 6, 1, &plan).unwrap();
    assert_eq!(out.per_tree, vec![vec![0b101101]]);
    assert!(out.rounds <= 3 + 2 + C_0);

    let none = vec![vec![]; 4];
    let out = pipelined_convergecast(&mut s, "cc", &[&t], &[none], 6, 11, &plan).unwrap();
    assert_eq!(out.per_tree, vec![Vec::<u64>::new()]);

    let mut items = vec![vec![]; 4];
    for k in 0..13u64 {
        items[(k % 4) as usize].push(40 - 3 * k);
    }
    let mut want: Vec<u64> = (0..13).map(|k| 40 - 3 * k).collect();
    want.sort_unstable();
    want.truncate(11);
    let out = pipelined_convergecast(&mut s, "cc", &[&t], &[items], 6, 11, &plan).unwrap();
    assert_eq!(out.per_tree, vec![want]);
}

/// A connected host graph plus `k` random trees in it.
fn instance(seed: u64, n: usize, k: usize) -> (Graph, Vec<RootedTree>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = std::collections::BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let g = Graph::new(n, edges).unwrap();
    let trees = (0..k)
        .map(|_| {
            let mut t = RootedTree::new(rng.gen_range(0..n), true);
            let target = rng.gen_range(1..=n.min(40));
            for _ in 0..4 * target {
                if t.len() >= target {
                    break;
                }
                let u = t.node_at(rng.gen_range(0..t.len()));
                let nb = g.neighbors(u);
                let v = nb[rng.gen_range(0..nb.len())];
                if !t.contains(v) {
                    t.add_child(v, u, rng.gen_bool(0.7)).unwrap();
                }
            }
            t
        })
        .collect();
    (g, trees)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operations_match_central_computation(
        seed in any::<u64>(),
        n in 2usize..120,
        k in 1usize..10,
        m in 1u32..20,
        slack in 0u32..12,
        unbounded in prop::bool::weighted(0.15),
    ) {
        let (g, trees) = instance(seed, n, k);
        let ids = IdAssignment::sequential(n);
        let refs: Vec<&RootedTree> = trees.iter().collect();
        let p = plan_channels(&refs, None).unwrap().p;
        let b = if unbounded { None } else { Some(p.max(1) as u32 + slack) };
        let plan = plan_channels(&refs, b).unwrap();
        let r = refs.iter().map(|t| t.depth()).max().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let values: Vec<Vec<u64>> = trees.iter().map(|t| (0..t.len()).map(|_| rng.gen_range(0..1u64 << m)).collect()).collect();
        let msgs: Vec<u64> = trees.iter().map(|_| rng.gen_range(0..1u64 << m)).collect();
        let cap = rng.gen_range(1..6);
        let items: Vec<Vec<Vec<u64>>> = trees
            .iter()
            .map(|t| (0..t.len()).map(|_| (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..1u64 << m)).collect()).collect())
            .collect();

        let mut fs = session(&g, &ids, b, Mode::Faithful);
        let mut ls = session(&g, &ids, b, Mode::Logical);
        let fsum = pipelined_sum(&mut fs, "sum", &refs, &values, m, &plan).unwrap();
        let lsum = pipelined_sum(&mut ls, "sum", &refs, &values, m, &plan).unwrap();
        let want: Vec<u128> = values.iter().map(|v| v.iter().map(|&x| x as u128).sum()).collect();
        prop_assert_eq!(&fsum, &lsum);
        prop_assert_eq!(&fsum.per_tree, &want);

        let fmin = pipelined_min(&mut fs, "min", &refs, &values, m, &plan).unwrap();
        let lmin = pipelined_min(&mut ls, "min", &refs, &values, m, &plan).unwrap();
        prop_assert_eq!(&fmin, &lmin);
        let want: Vec<u64> = values.iter().map(|v| *v.iter().min().unwrap()).collect();
        prop_assert_eq!(&fmin.per_tree, &want);

        let fbc = pipelined_broadcast(&mut fs, "bc", &refs, &msgs, m, &plan).unwrap();
        let lbc = pipelined_broadcast(&mut ls, "bc", &refs, &msgs, m, &plan).unwrap();
        prop_assert_eq!(&fbc, &lbc);

        let fcc = pipelined_convergecast(&mut fs, "cc", &refs, &items, m, cap, &plan).unwrap();
        let lcc = pipelined_convergecast(&mut ls, "cc", &refs, &items, m, cap, &plan).unwrap();
        prop_assert_eq!(&fcc, &lcc);

        prop_assert_eq!(fs.metrics().rounds_total, ls.metrics().rounds_total);
        if let Some(b) = b {
            prop_assert!(fs.metrics().max_edge_bits <= b as usize);
        }
        let size = refs.iter().map(|t| t.len()).max().unwrap();
        // The sum bound is stated on m for m >= ⌈log2 size⌉ + 1, where M <= 2m + 1.
        let m_sum = (m as usize).max(graph_core::ceil_log2(size) as usize + 1);
        prop_assert!(fsum.rounds <= round_bound(r, m_sum, plan.per_tree));
        prop_assert!(fsum.rounds <= r as u64 + chunks(sum_width(m, size), plan.per_tree) + 1);
        prop_assert!(fmin.rounds <= round_bound(r, m as usize, plan.per_tree));
        prop_assert!(fbc.rounds <= round_bound(r, m as usize, plan.per_tree));
        prop_assert!(fcc.rounds <= round_bound(r, cap * m as usize, plan.per_tree));

        // Non-interference: each tree alone, under the shared budget, gives the same answer.
        for (t, tree) in refs.iter().enumerate() {
            let solo = plan_channels(&[*tree], b).unwrap();
            let mut s1 = session(&g, &ids, b, Mode::Faithful);
            let alone = pipelined_sum(&mut s1, "sum", &[*tree], &values[t..t + 1], m, &solo).unwrap();
            prop_assert_eq!(alone.per_tree[0], fsum.per_tree[t]);
            let alone = pipelined_convergecast(&mut s1, "cc", &[*tree], &items[t..t + 1], m, cap, &solo).unwrap();
            prop_assert_eq!(&alone.per_tree[0], &fcc.per_tree[t]);
        }
    }
}

#[test]
fn long_broadcasts_match_across_modes() {
    use congest_sim::Bits;
    // Two trees share the edge 1-2, so each gets ⌊4/2⌋ = 2 bits per round.
    let g = path_graph(5);
    let ids = IdAssignment::sequential(5);
    let a = path_tree(&[0, 1, 2, 3]);
    let b = path_tree(&[4, 3, 2, 1]);
    let plan = plan_channels(&[&a, &b], Some(4)).unwrap();
    let mut long = Bits::new();
    (0..150).for_each(|i| long.push(i % 3 == 0));
    let short = Bits::from_uint(0b101, 3);
    let mut padded = short.clone();
    (3..150).for_each(|_| padded.push(false));
    let mut results = Vec::new();
    for mode in [Mode::Faithful, Mode::Logical] {
        let mut s = session(&g, &ids, Some(4), mode);
        let out = pipelined_broadcast_bits(&mut s, "bits", &[&a, &b], &[long.clone(), short.clone()], &plan).unwrap();
        assert_eq!(out.rounds, 3 - 1 + 75);
        assert_eq!(out.per_tree[0], vec![long.clone(); 4]);
        assert_eq!(out.per_tree[1], vec![padded.clone(); 4]);
        assert_eq!(s.metrics().rounds_total, out.rounds);
        results.push(out);
    }
    assert_eq!(results[0], results[1]);
    let single = RootedTree::new(2, true);
    let plan = plan_channels(&[&single], Some(4)).unwrap();
    let mut s = session(&g, &ids, Some(4), Mode::Faithful);
    let out = pipelined_broadcast_bits(&mut s, "bits", &[&single], &[long.clone()], &plan).unwrap();
    assert_eq!((out.rounds, &out.per_tree[0][0]), (0, &long));
}
