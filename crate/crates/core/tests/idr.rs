use ndarray::Array2;
use orbitrole::graph::{generate_planted_graph, Graph, NodeTable, Template};
use orbitrole::idr::{
    binned_idr_report, discipline_distance, diversity_report, rao_stirling,
    rao_stirling_from_proportions, Direction, DistanceMode, RaoStirlingConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL: RaoStirlingConfig = RaoStirlingConfig {
    direction: Direction::All,
    halve: false,
};

fn uniform(k: usize) -> Array2<f64> {
    Array2::from_shape_fn((k, k), |(i, j)| if i == j { 0.0 } else { 1.0 })
}

fn random_labelled_graph(n: usize, k: usize, seed: u64) -> (Graph, NodeTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < 0.15 {
                edges.push((u, v));
            }
        }
    }
    let mut table = NodeTable::new();
    for v in 0..n {
        let label = (rng.gen::<f64>() < 0.9).then(|| format!("d{}", rng.gen_range(0..k)));
        table.push(v.to_string(), label).unwrap();
    }
    (Graph::from_edge_slice(n, &edges), table)
}

#[test]
fn uniform_distances_give_the_simpson_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let k = rng.gen_range(2..12);
        let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let simpson = 1.0 - p.iter().map(|x| x * x).sum::<f64>();
        assert!((rao_stirling_from_proportions(&p, &uniform(k)) - simpson).abs() < 1e-12);
    }
    assert_eq!(
        rao_stirling_from_proportions(&[0.5, 0.25, 0.25], &uniform(3)),
        0.625
    );
}

#[test]
fn duplicating_a_neighbourhood_leaves_the_score_unchanged() {
    let labels = ["a", "a", "b", "c", "c", "c"];
    let build = |copies: usize| {
        let mut table = NodeTable::new();
        table.push("hub", None).unwrap();
        let mut edges = Vec::new();
        for c in 0..copies {
            for (i, l) in labels.iter().enumerate() {
                let v = table.push(format!("{c}-{i}"), Some(l.to_string())).unwrap();
                edges.push((0, v));
            }
        }
        (Graph::from_edge_slice(table.len(), &edges), table)
    };
    let (g1, t1) = build(1);
    let (g3, t3) = build(3);
    let d1 = discipline_distance(&t1, &g1, DistanceMode::Uniform).unwrap();
    let d3 = discipline_distance(&t3, &g3, DistanceMode::Uniform).unwrap();
    let s1 = rao_stirling(0, &g1, None, &t1, &d1, &ALL).unwrap().unwrap();
    let s3 = rao_stirling(0, &g3, None, &t3, &d3, &ALL).unwrap().unwrap();
    assert!((s1.idr - s3.idr).abs() < 1e-15);
    assert_eq!(s3.neighbors_used, 3 * s1.neighbors_used);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scores_are_bounded_by_the_weighted_simpson_index(seed in 0u64..10_000, k in 2usize..6) {
        let (g, t) = random_labelled_graph(40, k, seed);
        prop_assume!(t.distinct_categories().len() >= 2);
        let dmat = discipline_distance(&t, &g, DistanceMode::CocitationCosine).unwrap();
        let dmax = dmat.d.iter().copied().fold(0.0, f64::max);
        for v in 0..g.node_count() {
            if let Some(s) = rao_stirling(v, &g, None, &t, &dmat, &ALL).unwrap() {
                let mut counts = std::collections::BTreeMap::new();
                for &u in g.neighbors(v) {
                    if let Some(c) = t.category(u) {
                        *counts.entry(c).or_insert(0.0) += 1.0;
                    }
                }
                let n: f64 = counts.values().sum();
                let simpson = 1.0 - counts.values().map(|c| (c / n) * (c / n)).sum::<f64>();
                prop_assert!(s.idr >= 0.0);
                prop_assert!(s.idr <= dmax * simpson + 1e-12);
                prop_assert!(s.idr <= 1.0);
            }
        }
    }

    #[test]
    fn renaming_disciplines_changes_nothing(seed in 0u64..10_000, k in 2usize..6) {
        let (g, t) = random_labelled_graph(40, k, seed);
        prop_assume!(t.distinct_categories().len() >= 2);
        let mut renamed = t.clone();
        for v in 0..g.node_count() {
            let new = t.category(v).map(|c| format!("z{}", 9 - c[1..].parse::<usize>().unwrap()));
            renamed.set_category(v, new);
        }
        let da = discipline_distance(&t, &g, DistanceMode::CocitationCosine).unwrap();
        let db = discipline_distance(&renamed, &g, DistanceMode::CocitationCosine).unwrap();
        for v in 0..g.node_count() {
            let a = rao_stirling(v, &g, None, &t, &da, &ALL).unwrap().map(|s| s.idr);
            let b = rao_stirling(v, &g, None, &renamed, &db, &ALL).unwrap().map(|s| s.idr);
            match (a, b) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn bin_edges_cover_the_observed_degrees(seed in 0u64..10_000) {
        let (g, t) = random_labelled_graph(60, 3, seed);
        prop_assume!(t.distinct_categories().len() >= 2);
        let dmat = discipline_distance(&t, &g, DistanceMode::Uniform).unwrap();
        let roles: Vec<usize> = (0..60).map(|v| v % 2).collect();
        let report = diversity_report(&g, None, &t, &dmat, &roles, &ALL).unwrap();
        let table = binned_idr_report(&report, 10, 0).unwrap();
        prop_assert!(table.edges.windows(2).all(|w| w[0] < w[1]));
        for v in 0..60 {
            let d = g.degree(v);
            if d > 0 {
                let x = (d as f64).ln();
                prop_assert!(table.edges[0] <= x && x <= *table.edges.last().unwrap());
            }
        }
    }
}

#[test]
fn bridge_nodes_are_more_interdisciplinary_than_clique_nodes() {
    let templates = [Template::barbell(3, 1), Template::barbell(5, 1)];
    let planted = generate_planted_graph(&templates, 60, 0, 0).unwrap();
    let mut table = NodeTable::new();
    let mut roles = Vec::new();
    for (v, &r) in planted.true_role.iter().enumerate() {
        let name = &planted.role_names[r];
        let is_bridge = name.ends_with(":center");
        // Within each template copy, clique A precedes the bridge and clique B follows.
        let size = if name.starts_with("barbell3") { 7 } else { 11 };
        let offset = if name.starts_with("barbell3") {
            v
        } else {
            v - 7 * 60
        };
        let side = if offset % size < size / 2 { "d1" } else { "d2" };
        table.push(v.to_string(), Some(side.to_string())).unwrap();
        roles.push(usize::from(is_bridge));
    }
    let dmat = discipline_distance(&table, &planted.graph, DistanceMode::Uniform).unwrap();
    let report = diversity_report(&planted.graph, None, &table, &dmat, &roles, &ALL).unwrap();
    for row in &report.rows {
        if roles[row.node] == 1 {
            assert_eq!(row.idr, Some(0.5));
        }
    }
    let binned = binned_idr_report(&report, 10, 50).unwrap();
    let included = binned.included_bins();
    assert!(!included.is_empty());
    for bin in included {
        let bridge = binned.cell(bin, 1).unwrap().median.unwrap();
        let clique = binned.cell(bin, 0).unwrap().median.unwrap();
        assert!(bridge > clique, "bin {bin}: {bridge} vs {clique}");
    }
}
