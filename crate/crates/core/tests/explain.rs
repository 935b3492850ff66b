use ndarray::Array2;
use orbitrole::census::{count_orbits, log_transform, LogOrbitMatrix, ORBIT_COUNT};
use orbitrole::explain::{
    effect_curve, permutation_importance, refit_on_subpopulation, train_surrogate, EffectCurve,
    EffectKind, ForestConfig, SurrogateConfig,
};
use orbitrole::graph::{generate_planted_graph, Template};
use orbitrole::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent uniform log-count features on [0, 5); the last orbit is
/// constant zero.
fn synthetic(n: usize, seed: u64) -> LogOrbitMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Array2::from_shape_simple_fn((n, ORBIT_COUNT), || 5.0 * rng.gen::<f64>());
    values.column_mut(ORBIT_COUNT - 1).fill(0.0);
    LogOrbitMatrix { values }
}

fn threshold_labels(x: &LogOrbitMatrix, orbit: usize, c: f64) -> Vec<usize> {
    x.values
        .column(orbit)
        .iter()
        .map(|&v| usize::from(v > c))
        .collect()
}

fn all_features() -> SurrogateConfig {
    SurrogateConfig {
        forest: ForestConfig {
            mtry: Some(ORBIT_COUNT),
            trees: 50,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn biggest_step(curve: &EffectCurve) -> (f64, f64) {
    let k = (1..curve.grid.len())
        .max_by(|&a, &b| {
            let da = curve.values[a] - curve.values[a - 1];
            let db = curve.values[b] - curve.values[b - 1];
            da.total_cmp(&db)
        })
        .unwrap();
    (curve.grid[k - 1], curve.grid[k])
}

fn weighted_sum(curve: &EffectCurve) -> f64 {
    curve
        .values
        .iter()
        .zip(&curve.populations)
        .map(|(v, &p)| v * p as f64)
        .sum()
}

#[test]
fn threshold_labels_are_learned_and_ranked_first() {
    let x = synthetic(2000, 1);
    let y = threshold_labels(&x, 0, 2.5);
    let model = train_surrogate(&x, &y, &SurrogateConfig::default(), 7).unwrap();
    assert!(model.holdout_accuracy >= 0.99, "{}", model.holdout_accuracy);
    let report = permutation_importance(&model, &x, &y, 5, 3).unwrap();
    assert_eq!(report.rows[0].orbit, 0);
    assert_eq!(report.rows.len(), ORBIT_COUNT);
    assert!(report.rows.iter().all(|r| r.std >= 0.0));
    let constant = report
        .rows
        .iter()
        .find(|r| r.orbit == ORBIT_COUNT - 1)
        .unwrap();
    assert_eq!((constant.mean, constant.std), (0.0, 0.0));
}

#[test]
fn random_labels_score_at_chance() {
    let x = synthetic(3000, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let y: Vec<usize> = (0..3000).map(|_| rng.gen_range(0..3)).collect();
    let model = train_surrogate(&x, &y, &SurrogateConfig::default(), 7).unwrap();
    assert!(
        (model.holdout_accuracy - 1.0 / 3.0).abs() <= 0.05,
        "{}",
        model.holdout_accuracy
    );
}

#[test]
fn perfectly_predictive_binary_feature_costs_half_when_shuffled() {
    let mut x = synthetic(2000, 3);
    let y: Vec<usize> = (0..2000).map(|i| i % 2).collect();
    for (i, &label) in y.iter().enumerate() {
        x.values[[i, 5]] = label as f64;
    }
    let model = train_surrogate(&x, &y, &SurrogateConfig::default(), 1).unwrap();
    assert_eq!(model.holdout_accuracy, 1.0);
    let report = permutation_importance(&model, &x, &y, 5, 4).unwrap();
    assert_eq!(report.rows[0].orbit, 5);
    assert!(
        (report.rows[0].mean - 0.5).abs() < 0.05,
        "{}",
        report.rows[0].mean
    );
}

#[test]
fn ale_step_sits_at_the_label_threshold() {
    let x = synthetic(2000, 4);
    let (orbit, c) = (3, 2.0);
    let y = threshold_labels(&x, orbit, c);
    let model = train_surrogate(&x, &y, &all_features(), 5).unwrap();
    assert_eq!(model.forest.used_features(), vec![orbit]);

    let ale = effect_curve(&model, &x, orbit, 1, 32, EffectKind::Ale).unwrap();
    let (lo, hi) = biggest_step(&ale);
    assert!((0.5 * (lo + hi) - c).abs() <= hi - lo);
    assert!(weighted_sum(&ale).abs() < 1e-9);

    for other in [0, 10, 40, 71] {
        let flat = effect_curve(&model, &x, other, 1, 32, EffectKind::Ale).unwrap();
        assert!(flat.values.iter().all(|v| v.abs() < 1e-12));
    }
    let report = permutation_importance(&model, &x, &y, 3, 0).unwrap();
    for row in report.rows.iter().filter(|r| r.orbit != orbit) {
        assert_eq!(row.mean, 0.0);
    }
}

#[test]
fn ale_and_pdp_agree_for_a_single_feature_model() {
    let x = synthetic(1500, 5);
    let y = threshold_labels(&x, 7, 3.1);
    let model = train_surrogate(&x, &y, &all_features(), 2).unwrap();
    let ale = effect_curve(&model, &x, 7, 1, 32, EffectKind::Ale).unwrap();
    let pdp = effect_curve(&model, &x, 7, 1, 32, EffectKind::Pdp).unwrap();
    assert_eq!(ale.grid, pdp.grid);
    let width = ale.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let (a, _) = biggest_step(&ale);
    let (p, _) = biggest_step(&pdp);
    assert!((a - p).abs() <= 2.0 * width);
    let pdp_mean = weighted_sum(&pdp) / x.node_count() as f64;
    for (av, pv) in ale.values.iter().zip(&pdp.values) {
        assert!((av - (pv - pdp_mean)).abs() < 1e-9);
    }
}

#[test]
fn monotone_class_relabeling_only_renames_curves() {
    let x = synthetic(800, 6);
    let y = threshold_labels(&x, 2, 2.5);
    let shifted: Vec<usize> = y.iter().map(|l| l + 10).collect();
    let a = train_surrogate(&x, &y, &SurrogateConfig::default(), 8).unwrap();
    let b = train_surrogate(&x, &shifted, &SurrogateConfig::default(), 8).unwrap();
    assert_eq!(a.forest, b.forest);
    for (ca, cb) in [(0, 10), (1, 11)] {
        let ea = effect_curve(&a, &x, 2, ca, 16, EffectKind::Ale).unwrap();
        let eb = effect_curve(&b, &x, 2, cb, 16, EffectKind::Ale).unwrap();
        assert_eq!(ea.values, eb.values);
        assert_eq!(eb.class, cb);
    }
}

#[test]
fn forest_is_bit_stable_and_tree_order_free() {
    let x = synthetic(600, 7);
    let y = threshold_labels(&x, 1, 1.0);
    let a = train_surrogate(&x, &y, &SurrogateConfig::default(), 3).unwrap();
    let b = train_surrogate(&x, &y, &SurrogateConfig::default(), 3).unwrap();
    assert_eq!(a, b);
    let mut reversed = a.forest.clone();
    reversed.trees.reverse();
    for row in x.values.rows() {
        assert_eq!(a.forest.votes(row), reversed.votes(row));
    }
}

#[test]
fn constant_orbit_has_no_effect_grid() {
    let x = synthetic(300, 8);
    let y = threshold_labels(&x, 1, 2.0);
    let model = train_surrogate(&x, &y, &SurrogateConfig::default(), 3).unwrap();
    assert!(matches!(
        effect_curve(&model, &x, ORBIT_COUNT - 1, 1, 32, EffectKind::Ale),
        Err(Error::ConstantFeature(72))
    ));
}

#[test]
fn planted_roles_are_recovered_from_orbits() {
    let planted = generate_planted_graph(
        &[Template::barbell(5, 1), Template::Star { leaves: 5 }],
        20,
        0,
        1,
    )
    .unwrap();
    let log = log_transform(&count_orbits(&planted.graph).unwrap());
    let model = train_surrogate(&log, &planted.true_role, &SurrogateConfig::default(), 4).unwrap();
    assert!(model.holdout_accuracy >= 0.95, "{}", model.holdout_accuracy);
}

#[test]
fn single_class_and_single_role_refits_are_rejected() {
    let x = synthetic(50, 9);
    assert!(matches!(
        train_surrogate(&x, &[4; 50], &SurrogateConfig::default(), 0),
        Err(Error::TooFewClasses(1))
    ));
    let y: Vec<usize> = (0..50).map(|i| i % 3).collect();
    assert!(matches!(
        refit_on_subpopulation(&x, &y, &[1], &SurrogateConfig::default(), 0),
        Err(Error::TooFewClasses(1))
    ));
}

#[test]
fn refit_on_all_roles_matches_a_direct_fit() {
    let x = synthetic(400, 10);
    let y: Vec<usize> = x
        .values
        .column(4)
        .iter()
        .map(|&v| (v / 2.0) as usize)
        .collect();
    let direct = train_surrogate(&x, &y, &SurrogateConfig::default(), 6).unwrap();
    let refit = refit_on_subpopulation(&x, &y, &[0, 1, 2], &SurrogateConfig::default(), 6).unwrap();
    assert_eq!(refit.rows, (0..400).collect::<Vec<_>>());
    assert_eq!(refit.model, direct);
}

#[test]
fn star_adjacent_chain_orbit_separates_small_bridge_roles() {
    // Two small roles: the middle of a 3-node bridge between stars, and the
    // single bridge node between cliques. Only the former sits at the end of
    // a chain next to a star.
    let planted = generate_planted_graph(
        &[
            Template::barbell(5, 1),
            Template::StarBarbell {
                leaves: 4,
                bridge: 3,
            },
            Template::Star { leaves: 5 },
        ],
        20,
        20,
        0,
    )
    .unwrap();
    let counts = count_orbits(&planted.graph).unwrap();
    let log = log_transform(&counts);
    let star_center = planted.role_id("starbarbell4-3:center").unwrap();
    let clique_center = planted.role_id("barbell5-1:center").unwrap();
    let sub = refit_on_subpopulation(
        &log,
        &planted.true_role,
        &[star_center, clique_center],
        &SurrogateConfig::default(),
        3,
    )
    .unwrap();
    assert!(sub.model.holdout_accuracy >= 0.9);
    assert!(sub.model.forest.used_features().contains(&18));
    let mean18 = |role: usize| {
        let rows: Vec<f64> = (0..planted.graph.node_count())
            .filter(|&v| planted.true_role[v] == role)
            .map(|v| log.values[[v, 18]])
            .collect();
        rows.iter().sum::<f64>() / rows.len() as f64
    };
    assert!(mean18(star_center) > mean18(clique_center));
}
