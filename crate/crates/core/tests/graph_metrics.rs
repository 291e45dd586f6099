mod common;

use approx::assert_abs_diff_eq;
use common::*;
use neatflow::graph::{
    degree_entropy, eigenvector_centrality, global_efficiency, local_efficiency, shortest_paths, EigenConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TIGHT: EigenConfig = EigenConfig { tol: 1e-13, max_iter: 1_000_000 };

fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..=12, any::<u64>(), 0.05f64..0.9).prop_map(|(n, seed, p)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (n, random_edges(&mut rng, n, p))
    })
}

fn permuted(n: usize, edges: &[(usize, usize)], seed: u64) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
    edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect()
}

proptest! {
    #[test]
    fn bfs_matches_floyd_warshall((n, edges) in arb_graph()) {
        let d = shortest_paths(&graph(n, &edges));
        let fw = floyd_warshall(&adjacency(n, &edges));
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(d.get(i, j), fw[i][j]);
            }
        }
    }

    #[test]
    fn efficiencies_match_oracle((n, edges) in arb_graph()) {
        let g = graph(n, &edges);
        let a = adjacency(n, &edges);
        prop_assert!((global_efficiency(&g) - oracle_global_efficiency(&a)).abs() <= 1e-12);
        prop_assert!((local_efficiency(&g) - oracle_local_efficiency(&a)).abs() <= 1e-12);
    }

    #[test]
    fn metrics_are_permutation_invariant((n, edges) in arb_graph(), seed in any::<u64>()) {
        let g = graph(n, &edges);
        let h = graph(n, &permuted(n, &edges, seed));
        prop_assert!((global_efficiency(&g) - global_efficiency(&h)).abs() <= 1e-12);
        prop_assert!((local_efficiency(&g) - local_efficiency(&h)).abs() <= 1e-12);
        prop_assert!((degree_entropy(&g) - degree_entropy(&h)).abs() <= 1e-12);
        let eg = eigenvector_centrality(&g, TIGHT).unwrap();
        let eh = eigenvector_centrality(&h, TIGHT).unwrap();
        if eg.converged && eh.converged {
            prop_assert!((eg.centrality.aggregate - eh.centrality.aggregate).abs() <= 1e-8);
        }
    }

    #[test]
    fn adding_an_edge_never_lowers_global_efficiency((n, edges) in arb_graph(), a in 0usize..12, b in 0usize..12) {
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let before = global_efficiency(&graph(n, &edges));
        let mut more = edges.clone();
        more.push((a, b));
        prop_assert!(global_efficiency(&graph(n, &more)) >= before - 1e-15);
    }

    #[test]
    fn entropy_zero_iff_regular((n, edges) in arb_graph()) {
        let g = graph(n, &edges);
        let regular = (0..n).all(|i| g.degree(i) == g.degree(0));
        let h = degree_entropy(&g);
        prop_assert!(h >= 0.0);
        prop_assert_eq!(h == 0.0, regular);
    }

    #[test]
    fn centralities_stay_in_unit_interval((n, edges) in arb_graph()) {
        let g = graph(n, &edges);
        let dc = neatflow::graph::degree_centrality(&g);
        prop_assert!(dc.per_node.values().all(|v| (0.0..=1.0).contains(v)));
        let ec = eigenvector_centrality(&g, EigenConfig::default()).unwrap();
        prop_assert!(ec.centrality.per_node.values().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
    }
}

#[test]
fn eigenvector_matches_dense_solver_on_connected_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 300 {
        let n = 2 + (checked % 11);
        let edges = random_edges(&mut rng, n, 0.4);
        let a = adjacency(n, &edges);
        if !is_connected(&a) {
            continue;
        }
        let ec = eigenvector_centrality(&graph(n, &edges), TIGHT).unwrap();
        assert!(ec.converged);
        let oracle = oracle_eigenvector(&a);
        for (i, (got, want)) in ec.centrality.per_node.values().zip(&oracle).enumerate() {
            assert!((got - want).abs() <= 1e-6, "node {i}: {got} vs {want} on {edges:?}");
        }
        checked += 1;
    }
}

#[test]
fn closed_forms() {
    let k4 = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    assert_abs_diff_eq!(global_efficiency(&k4), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(local_efficiency(&k4), 1.0, epsilon = 1e-12);
    assert_eq!(degree_entropy(&k4), 0.0);

    let p3 = graph(3, &[(0, 1), (1, 2)]);
    assert_abs_diff_eq!(global_efficiency(&p3), 5.0 / 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(degree_entropy(&p3), 0.636_514_168_294_813_4, epsilon = 1e-9);

    let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let ec = eigenvector_centrality(&c4, EigenConfig::default()).unwrap();
    for v in ec.centrality.per_node.values() {
        assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-6);
    }
    assert_eq!(degree_entropy(&c4), 0.0);

    // Petersen graph: 3-regular.
    let petersen = graph(
        10,
        &[
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
        ],
    );
    assert_eq!(degree_entropy(&petersen), 0.0);
}
