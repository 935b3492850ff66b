use std::time::Instant;

use ndarray::Array2;
use orbitrole::census::{count_orbits, log_transform};
use orbitrole::cluster::{
    kmeans, kmeans_points, normalized_mutual_information, silhouette, sweep, KmeansConfig,
    SweepConfig,
};
use orbitrole::embed::{graphwave_embed, rolx_embed, EmbeddingMatrix, GraphWaveConfig, RolxConfig};
use orbitrole::graph::{generate_planted_graph, Template};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn two_clouds(per: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    Array2::from_shape_fn((2 * per, 2), |(i, _)| {
        let centre = if i < per { 0.0 } else { 10.0 };
        centre + noise.sample(&mut rng)
    })
}

fn uniform_points(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_simple_fn((n, d), || rng.gen::<f64>())
}

#[test]
fn separated_clouds_are_split_exactly() {
    let data = two_clouds(100, 3);
    let a = kmeans_points(data.view(), 2, 11, &KmeansConfig::default()).unwrap();
    assert!(a.labels[..100].iter().all(|&l| l == 0));
    assert!(a.labels[100..].iter().all(|&l| l == 1));
    for (c, centre) in [(0, 0.0), (1, 10.0)] {
        for x in a.centroids.row(c) {
            assert!((x - centre).abs() < 0.1);
        }
    }
    assert!(a.converged && !a.degenerate);
}

#[test]
fn random_labels_have_no_silhouette() {
    for seed in 0..10 {
        let data = uniform_points(300, 3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let labels: Vec<usize> = (0..300).map(|_| rng.gen_range(0..3)).collect();
        let s = silhouette(data.view(), &labels, 20_000, 0).unwrap();
        assert!(s.score.abs() < 0.1, "seed {seed}: {}", s.score);
    }
}

#[test]
fn graphwave_recovers_planted_barbell_roles() {
    let start = Instant::now();
    let planted = generate_planted_graph(&[Template::barbell(5, 1)], 20, 0, 0).unwrap();
    let emb = graphwave_embed(&planted.graph, &GraphWaveConfig::default()).unwrap();
    let a = kmeans(&emb, 3, 7).unwrap();
    let nmi = normalized_mutual_information(&a.labels, &planted.true_role);
    assert!(nmi >= 0.9, "NMI {nmi}");

    let rolx = rolx_embed(
        &planted.graph,
        &RolxConfig {
            rank: 3,
            ..Default::default()
        },
    )
    .unwrap();
    let b = kmeans(&rolx.embedding, 3, 7).unwrap();
    let nmi = normalized_mutual_information(&b.labels, &planted.true_role);
    assert!(nmi >= 0.7, "NMI {nmi}");
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn sweep_shapes_and_planted_optimum() {
    let planted = generate_planted_graph(&[Template::barbell(5, 1)], 20, 0, 0).unwrap();
    let log = log_transform(&count_orbits(&planted.graph).unwrap());
    let emb = graphwave_embed(&planted.graph, &GraphWaveConfig::default()).unwrap();

    let short = sweep(
        std::slice::from_ref(&emb),
        &log,
        &SweepConfig {
            k_range: 2..=4,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(short.rows.len(), 3);
    assert_eq!(short.best_k("graphwave"), Some(3));

    let tagged: Vec<EmbeddingMatrix> = ["a", "b", "c", "d"]
        .iter()
        .map(|t| EmbeddingMatrix {
            method_tag: t.to_string(),
            ..emb.clone()
        })
        .collect();
    let full = sweep(&tagged, &log, &SweepConfig::default()).unwrap();
    assert_eq!(full.rows.len(), 72);
    assert!(full
        .rows
        .iter()
        .all(|r| (-1.0..=1.0).contains(&r.silhouette)));
}

#[test]
fn kmeans_is_seed_stable() {
    let data = uniform_points(200, 4, 9);
    let config = KmeansConfig::default();
    assert_eq!(
        kmeans_points(data.view(), 5, 42, &config).unwrap(),
        kmeans_points(data.view(), 5, 42, &config).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wcss_never_increases(seed in 0u64..10_000, k in 2usize..8) {
        let data = uniform_points(120, 3, seed);
        let a = kmeans_points(data.view(), k, seed, &KmeansConfig::default()).unwrap();
        for pair in a.wcss_history.windows(2) {
            prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
        prop_assert!(a.labels.iter().all(|&l| l < a.k_effective));
    }

    #[test]
    fn silhouette_ignores_label_names(seed in 0u64..10_000, k in 2usize..5) {
        let data = uniform_points(60, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels: Vec<usize> = (0..60).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
        let renamed: Vec<usize> = labels.iter().map(|&l| 100 - 7 * l).collect();
        let a = silhouette(data.view(), &labels, 1000, 0).unwrap();
        let b = silhouette(data.view(), &renamed, 1000, 0).unwrap();
        prop_assert!((a.score - b.score).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&a.score));
    }
}
