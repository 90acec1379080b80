mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use localcent::compare::{
    community_eigenvector_centrality, default_power_grid, distance, fit_power, pagerank, rescale,
    MadMode, PagerankOptions,
};
use localcent::graph::{
    build_adjacency, induced_subgraph, laplacian, normalized_laplacian, planted_partition, Graph,
};
use localcent::ingest::{
    load_contacts, load_edge_list, load_road_network, travel_time, ContactOptions,
    EdgeListOptions, RoadOptions,
};
use localcent::spectral::{
    centrality_from_spectrum, decompose, eigengaps, DecomposeOptions, KSelection,
};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<bool>())
        .prop_flat_map(|(n, directed)| {
            let edges = prop::collection::vec((0..n, 0..n, 0.1f64..2.0), 0..=n * n / 2 + 1);
            (Just(n), Just(directed), edges)
        })
        .prop_map(|(n, directed, edges)| {
            let edges = edges.into_iter().filter(|(i, j, _)| i != j);
            Graph::new(ids(n), directed, edges).unwrap()
        })
}

fn arb_labelled_graph() -> impl Strategy<Value = Graph> {
    (arb_graph(14), prop::collection::vec(0..3usize, 14)).prop_map(|(g, labels)| {
        let labels = labels[..g.node_count()].iter().map(|l| format!("c{l}")).collect();
        g.with_communities(labels).unwrap()
    })
}

fn arb_positive_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 2..30).prop_filter("some positive entry", |v| v.iter().any(|x| *x > 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn undirected_adjacency_is_symmetric(g in arb_graph(20)) {
        let a = build_adjacency(&g);
        if !g.is_directed() {
            prop_assert!(a.is_symmetric());
        }
        let total: f64 = a.as_row_major().iter().sum();
        let expected = if g.is_directed() { g.total_weight() } else { 2.0 * g.total_weight() };
        prop_assert!((total - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn laplacian_rows_sum_to_zero(g in arb_graph(20)) {
        let l = laplacian(&build_adjacency(&g)).unwrap();
        let tol = 1e-10 * l.max_abs().max(f64::MIN_POSITIVE);
        for s in l.row_sums() {
            prop_assert!(s.abs() <= tol);
        }
    }

    #[test]
    fn normalized_laplacian_spectrum_in_range(seed in any::<u64>(), n in 3usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_aperiodic(&mut rng, n);
        let l = normalized_laplacian(&build_adjacency(&g)).unwrap();
        let s = decompose(&l, &DecomposeOptions::default()).unwrap();
        let re = s.real_parts();
        prop_assert!(re[n - 1].abs() <= 1e-8);
        prop_assert!(re[0] <= 2.0 + 1e-8);
    }

    #[test]
    fn induced_subgraph_keeps_only_its_label(g in arb_labelled_graph()) {
        let labels = g.communities().unwrap().to_vec();
        for label in g.community_labels().unwrap() {
            let sub = induced_subgraph(&g, &label).unwrap();
            let expected: Vec<&String> = g.node_ids().iter().zip(&labels).filter(|(_, l)| **l == label).map(|(id, _)| id).collect();
            prop_assert_eq!(sub.node_ids().iter().collect::<Vec<_>>(), expected);
            for e in sub.edges() {
                let (s, t) = (g.index_of(&sub.node_ids()[e.source]).unwrap(), g.index_of(&sub.node_ids()[e.target]).unwrap());
                prop_assert!(labels[s] == label && labels[t] == label);
            }
        }
    }

    #[test]
    fn planted_partition_is_seed_deterministic(seed in any::<u64>()) {
        let a = planted_partition(3, 6, 0.7, 0.1, seed).unwrap();
        let b = planted_partition(3, 6, 0.7, 0.1, seed).unwrap();
        prop_assert_eq!(build_adjacency(&a), build_adjacency(&b));
        prop_assert_eq!(a.communities(), b.communities());
    }

    #[test]
    fn spectral_invariants(g in arb_graph(16)) {
        let a = build_adjacency(&g);
        let s = decompose(&a, &DecomposeOptions::default()).unwrap();
        prop_assert!(s.max_residual() <= 1e-8);
        if s.len() < 2 {
            return Ok(());
        }
        let gaps = eigengaps(&s).unwrap();
        prop_assert!(gaps.gaps.iter().all(|g| *g >= 0.0));
        for k in 1..=s.len() {
            let lc = match centrality_from_spectrum(&s, &gaps, KSelection::Fixed(k)) {
                Ok(lc) => lc,
                // k splitting a conjugate pair at the very end cannot be extended
                Err(_) => continue,
            };
            let sq: f64 = lc.centrality.values.iter().map(|c| c * c).sum();
            prop_assert!((sq - lc.v.nonzero_columns() as f64).abs() <= 1e-10);
            prop_assert!(lc.centrality.values.iter().all(|c| *c >= 0.0));
        }
    }

    #[test]
    fn centrality_ignores_eigenvector_signs(g in arb_graph(14), flips in prop::collection::vec(any::<bool>(), 14)) {
        let s = decompose(&build_adjacency(&g), &DecomposeOptions::default()).unwrap();
        if s.len() < 2 {
            return Ok(());
        }
        let gaps = eigengaps(&s).unwrap();
        let Ok(base) = centrality_from_spectrum(&s, &gaps, KSelection::Auto) else { return Ok(()) };
        let mut flipped = s.clone();
        for (j, f) in flips.iter().take(s.len()).enumerate() {
            if *f {
                flipped.negate_column(j);
            }
        }
        let other = centrality_from_spectrum(&flipped, &gaps, KSelection::Auto).unwrap();
        for (a, b) in base.centrality.values.iter().zip(&other.centrality.values) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn pagerank_is_a_distribution(g in arb_graph(20), damping in 0.0f64..0.99) {
        let a = build_adjacency(&g);
        let pr = pagerank(&a, &PagerankOptions { damping, ..Default::default() }).unwrap();
        let sum: f64 = pr.values.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        let floor = (1.0 - damping) / g.node_count() as f64;
        prop_assert!(pr.values.iter().all(|v| *v >= floor * (1.0 - 1e-12)));
    }

    #[test]
    fn rescale_is_scale_invariant(x in arb_positive_vector(), alpha in 1e-3f64..1e3, p in 0.01f64..3.0) {
        let a = rescale(&x, p).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * alpha).collect();
        let b = rescale(&scaled, p).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1e-300) || (u - v).abs() <= 1e-15);
        }
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rescale_preserves_ranking(x in arb_positive_vector(), p in 0.05f64..3.0) {
        let r = rescale(&x, p).unwrap();
        for i in 0..x.len() {
            for j in 0..x.len() {
                if x[i] > x[j] {
                    prop_assert!(r[i] > r[j], "x[{}]={} > x[{}]={} but {} <= {}", i, x[i], j, x[j], r[i], r[j]);
                }
            }
        }
    }

    #[test]
    fn distance_is_symmetric(x in prop::collection::vec(-5.0f64..5.0, 2..25), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm = random_permutation(&mut rng, x.len());
        let y: Vec<f64> = perm.iter().map(|&i| x[i] * 1.5 + 0.25).collect();
        for mode in [MadMode::CenterScale, MadMode::ScaleOnly, MadMode::None] {
            let d1 = distance(&x, &y, mode).unwrap();
            let d2 = distance(&y, &x, mode).unwrap();
            prop_assert_eq!(d1, d2);
            prop_assert!(d1 >= 0.0);
        }
    }

    #[test]
    fn fit_power_result_is_reproducible(x in arb_positive_vector(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm = random_permutation(&mut rng, x.len());
        let reference: Vec<f64> = perm.iter().map(|&i| x[i] + 0.5).collect();
        let grid = default_power_grid();
        let fit = fit_power(&x, &reference, &grid, MadMode::CenterScale).unwrap();
        prop_assert!(grid.contains(&fit.p));
        let d = distance(&rescale(&x, fit.p).unwrap(), &reference, MadMode::CenterScale).unwrap();
        prop_assert_eq!(d, fit.distance);
        prop_assert!(fit.curve.iter().all(|(_, c)| *c >= fit.distance));
    }

    #[test]
    fn community_centrality_ignores_label_names(g in arb_labelled_graph()) {
        let renamed: Vec<String> = g.communities().unwrap().iter().map(|l| format!("zz-{}", l.to_uppercase())).collect();
        let h = g.clone().with_communities(renamed).unwrap();
        let a = community_eigenvector_centrality(&g).unwrap();
        let b = community_eigenvector_centrality(&h).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn edge_list_ignores_row_order(g in arb_graph(12), seed in any::<u64>()) {
        let ids = g.node_ids();
        let mut rows: Vec<String> = g.edges().iter().map(|e| format!("{},{},{}", ids[e.source], ids[e.target], e.weight)).collect();
        let opts = EdgeListOptions { directed: g.is_directed(), ..Default::default() };
        let a = load_edge_list(rows.join("\n").as_bytes(), &opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perm = random_permutation(&mut rng, rows.len());
        rows = perm.iter().map(|&i| rows[i].clone()).collect();
        let b = load_edge_list(rows.join("\n").as_bytes(), &opts).unwrap();
        prop_assert_eq!(a.node_ids(), b.node_ids());
        prop_assert_eq!(build_adjacency(&a), build_adjacency(&b));
    }

    #[test]
    fn contact_weight_equals_record_count(records in prop::collection::vec((0u32..1000, 0usize..8, 0usize..8), 1..60)) {
        let text: String = records.iter().map(|(t, i, j)| format!("{t}\tn{i}\tn{j}\n")).collect();
        let net = load_contacts(text.as_bytes(), None, &ContactOptions::default()).unwrap();
        let valid = records.iter().filter(|(_, i, j)| i != j).count();
        prop_assert_eq!(net.records, valid);
        prop_assert_eq!(net.graph.total_weight(), valid as f64);
        prop_assert_eq!(net.warnings.len(), records.len() - valid);
    }

    #[test]
    fn travel_time_has_kinematic_floor(d in 1e-3f64..1e5, v in 1e-2f64..100.0) {
        let t = travel_time(d, v);
        prop_assert!(t >= d.sqrt() * (1.0 - 1e-15));
        prop_assert!(t >= d / v);
    }

    #[test]
    fn road_weights_lie_in_unit_interval(edges in prop::collection::vec((0usize..6, 0usize..6, 1e-3f64..1e4, 1.0f64..130.0), 1..20)) {
        let nodes: String = std::iter::once("id,lat,lon\n".to_string()).chain((0..6).map(|i| format!("r{i},55.{i},-4.{i}\n"))).collect();
        let rows: String = edges.iter().map(|(u, v, l, s)| format!("r{u},r{v},{l},{s}\n")).collect();
        let g = load_road_network(nodes.as_bytes(), rows.as_bytes(), &RoadOptions::default()).unwrap();
        prop_assert!(g.edges().iter().all(|e| e.weight > 0.0 && e.weight <= 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn small_integer_graphs_match_characteristic_polynomial(seed in any::<u64>(), n in 1usize..=6, directed in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, directed, Weights::Integer);
        let a = build_adjacency(&g);
        let s = decompose(&a, &DecomposeOptions::default()).unwrap();
        let oracle = charpoly_eigenvalues(&a);
        let d = multiset_distance(&oracle, &s.eigenvalues);
        prop_assert!(d <= 1e-8, "eigenvalue mismatch {d:e}: oracle {oracle:?}, solver {:?}", s.eigenvalues);
    }
}

#[test]
fn characteristic_polynomial_oracle_self_check() {
    use num_complex::Complex64;
    // directed 3-cycle: λ³ − 1
    let a = build_adjacency(&directed_cycle(3));
    let roots = charpoly_eigenvalues(&a);
    let expected: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0)).collect();
    assert!(multiset_distance(&roots, &expected) < 1e-14);
    // K3: (λ − 2)(λ + 1)²
    let roots = charpoly_eigenvalues(&build_adjacency(&complete(3)));
    let expected = [2.0, -1.0, -1.0].map(|r| Complex64::new(r, 0.0));
    assert!(multiset_distance(&roots, &expected) < 1e-14);
    // path: λⁿ
    let roots = charpoly_eigenvalues(&build_adjacency(&directed_path(5)));
    assert!(roots.iter().all(|r| r.norm() == 0.0));
}
