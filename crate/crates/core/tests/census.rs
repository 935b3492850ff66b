use std::collections::HashMap;
use std::path::PathBuf;

use orbitrole::census::{count_orbits, count_orbits_bruteforce, read_orbit_csv, ORBIT_COUNT};
use orbitrole::graph::{generate_planted_graph, load_edge_list, Graph, IdPolicy, Template};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_slice(n, &edges)
}

fn triangles_by_enumeration(g: &Graph) -> u64 {
    let mut t = 0;
    for (u, v) in g.edges() {
        for &w in g.neighbors(v) {
            if w > v && g.has_edge(u, w) {
                t += 1;
            }
        }
    }
    t
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

#[test]
fn matches_oracle_on_small_random_graphs() {
    for (i, &(n, p)) in [(40, 0.1), (60, 0.05), (80, 0.02), (30, 0.3)]
        .iter()
        .enumerate()
    {
        let g = erdos_renyi(n, p, i as u64);
        assert_eq!(
            count_orbits(&g).unwrap(),
            count_orbits_bruteforce(&g, 300).unwrap()
        );
    }
}

#[test]
fn matches_external_reference_counts() {
    let loaded = load_edge_list(data("reference.edges"), IdPolicy::Create, None).unwrap();
    let counts = count_orbits(&loaded.graph).unwrap();
    let (ids, reference) = read_orbit_csv(data("reference_orbits.csv")).unwrap();
    let row_of: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    for v in 0..loaded.graph.node_count() {
        let r = row_of[loaded.table.id(v)];
        assert_eq!(
            counts.counts.row(v),
            reference.counts.row(r),
            "node {}",
            loaded.table.id(v)
        );
    }
    assert!(counts.column_sum(72) > 0);
}

#[test]
fn orbit_sum_identities() {
    let mut graphs = vec![
        erdos_renyi(120, 0.05, 11),
        generate_planted_graph(
            &[Template::barbell(5, 1), Template::Star { leaves: 6 }],
            4,
            10,
            3,
        )
        .unwrap()
        .graph,
    ];
    graphs.push(Graph::from_edge_slice(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
    for g in &graphs {
        let m = count_orbits(g).unwrap();
        assert_eq!(m.column_sum(0), 2 * g.edge_count() as u64);
        assert_eq!(m.column_sum(3), 3 * triangles_by_enumeration(g));
        assert_eq!(m.column_sum(1), 2 * m.column_sum(2));
        for v in 0..g.node_count() {
            assert_eq!(m.get(v, 0), g.degree(v) as u64);
        }
    }
}

#[test]
fn k5_has_no_chain_or_star_orbits() {
    let edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
        .collect();
    let m = count_orbits(&Graph::from_edge_slice(5, &edges)).unwrap();
    for v in 0..5 {
        assert_eq!((m.get(v, 0), m.get(v, 3), m.get(v, 72)), (4, 6, 1));
        for o in [1, 2, 4, 5, 6, 7, 15, 16, 17, 18, 19, 20, 21, 22, 23] {
            assert_eq!(m.get(v, o), 0);
        }
    }
}

#[test]
fn edge_addition_bumps_endpoint_degrees_only() {
    let g = erdos_renyi(50, 0.08, 5);
    let (u, v) = (0..50)
        .flat_map(|u| (u + 1..50).map(move |v| (u, v)))
        .find(|&(u, v)| !g.has_edge(u, v))
        .unwrap();
    let before = count_orbits(&g).unwrap();
    let h = Graph::from_edges(50, g.edges().chain([(u, v)])).unwrap().0;
    let after = count_orbits(&h).unwrap();
    for w in 0..50 {
        let bump = u64::from(w == u || w == v);
        assert_eq!(after.get(w, 0), before.get(w, 0) + bump);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabeling_permutes_rows(seed in 0u64..10_000, n in 5usize..40) {
        let g = erdos_renyi(n, 0.15, seed);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let h = g.permute(&perm).unwrap();
        let a = count_orbits(&g).unwrap();
        let b = count_orbits(&h).unwrap();
        prop_assert_eq!(a.permute_rows(&perm), b);
    }

    #[test]
    fn fast_counter_equals_oracle(seed in 0u64..10_000, n in 2usize..30, p in 0.05f64..0.5) {
        let g = erdos_renyi(n, p, seed);
        prop_assert_eq!(count_orbits(&g).unwrap(), count_orbits_bruteforce(&g, 300).unwrap());
    }
}

#[test]
fn result_is_independent_of_thread_count() {
    let g = erdos_renyi(150, 0.06, 77);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let a = single.install(|| count_orbits(&g).unwrap());
    let b = count_orbits(&g).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.counts.ncols(), ORBIT_COUNT);
}
