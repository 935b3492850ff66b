use std::collections::BTreeSet;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::forest::{ForestConfig, RandomForest};
use crate::census::{LogOrbitMatrix, ORBIT_COUNT};
use crate::seeds::{derive, Stage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateConfig {
    pub forest: ForestConfig,
    pub holdout_fraction: f64,
    /// Orbits left out of the feature set (for instance orbit 0, degree).
    pub exclude_orbits: Vec<usize>,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            forest: ForestConfig::default(),
            holdout_fraction: 0.2,
            exclude_orbits: Vec::new(),
        }
    }
}

/// Random forest mapping log orbit vectors to role labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateForest {
    pub forest: RandomForest,
    /// Orbit id of each model column.
    pub feature_orbits: Vec<usize>,
    /// Role id of each internal class index, ascending.
    pub class_labels: Vec<usize>,
    /// Rows of the training matrix held out from fitting.
    pub holdout: Vec<usize>,
    pub holdout_accuracy: f64,
    pub seed: u64,
}

impl SurrogateForest {
    pub fn feature_names(&self) -> Vec<String> {
        self.feature_orbits
            .iter()
            .map(|o| format!("o{o}"))
            .collect()
    }

    /// Model columns picked out of a full 73-column orbit matrix.
    pub fn select(&self, features: &LogOrbitMatrix) -> Result<Array2<f64>> {
        if features.feature_count() != ORBIT_COUNT {
            return Err(Error::Dimension(format!(
                "expected {ORBIT_COUNT} orbit columns, got {}",
                features.feature_count()
            )));
        }
        Ok(features.values.select(Axis(1), &self.feature_orbits))
    }

    pub fn class_index(&self, role: usize) -> Result<usize> {
        self.class_labels.binary_search(&role).map_err(|_| {
            Error::InvalidParameter(format!("role {role} is not a class of this model"))
        })
    }

    pub fn column_of(&self, orbit: usize) -> Result<usize> {
        self.feature_orbits
            .iter()
            .position(|&o| o == orbit)
            .ok_or_else(|| Error::InvalidParameter(format!("orbit {orbit} is not a model feature")))
    }

    /// Predicted role id per row of a full orbit matrix.
    pub fn predict(&self, features: &LogOrbitMatrix) -> Result<Vec<usize>> {
        let x = self.select(features)?;
        Ok(self
            .forest
            .predict(x.view())
            .into_iter()
            .map(|c| self.class_labels[c])
            .collect())
    }
}

/// Fits a forest on all rows except a seeded holdout share, then scores the
/// holdout. The split ignores labels.
pub fn train_surrogate(
    features: &LogOrbitMatrix,
    labels: &[usize],
    config: &SurrogateConfig,
    seed: u64,
) -> Result<SurrogateForest> {
    let n = features.node_count();
    if labels.len() != n {
        return Err(Error::Dimension(format!(
            "{} labels for {n} feature rows",
            labels.len()
        )));
    }
    if features.feature_count() != ORBIT_COUNT {
        return Err(Error::Dimension(format!(
            "expected {ORBIT_COUNT} orbit columns, got {}",
            features.feature_count()
        )));
    }
    if !(0.0..1.0).contains(&config.holdout_fraction) {
        return Err(Error::InvalidParameter(
            "holdout fraction must lie in [0, 1)".into(),
        ));
    }
    let class_labels: Vec<usize> = labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if class_labels.len() < 2 {
        return Err(Error::TooFewClasses(class_labels.len()));
    }
    let y: Vec<usize> = labels
        .iter()
        .map(|l| {
            class_labels
                .binary_search(l)
                .expect("label collected above")
        })
        .collect();
    let feature_orbits: Vec<usize> = (0..ORBIT_COUNT)
        .filter(|o| !config.exclude_orbits.contains(o))
        .collect();
    if feature_orbits.is_empty() {
        return Err(Error::InvalidParameter("every orbit is excluded".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive(
        seed,
        Stage::Validate,
        0,
    )));
    let n_holdout = (config.holdout_fraction * n as f64).ceil() as usize;
    let n_holdout = n_holdout.min(n.saturating_sub(1));
    let mut holdout = order[..n_holdout].to_vec();
    let mut train = order[n_holdout..].to_vec();
    holdout.sort_unstable();
    train.sort_unstable();

    let x = features.values.select(Axis(1), &feature_orbits);
    let x_train = x.select(Axis(0), &train);
    let y_train: Vec<usize> = train.iter().map(|&i| y[i]).collect();
    let forest = RandomForest::fit(
        x_train.view(),
        &y_train,
        class_labels.len(),
        &config.forest,
        derive(seed, Stage::Surrogate, 0),
    )?;

    let holdout_accuracy = if holdout.is_empty() {
        f64::NAN
    } else {
        let predicted = forest.predict(x.select(Axis(0), &holdout).view());
        let hits = holdout
            .iter()
            .zip(&predicted)
            .filter(|(&i, &p)| y[i] == p)
            .count();
        hits as f64 / holdout.len() as f64
    };
    Ok(SurrogateForest {
        forest,
        feature_orbits,
        class_labels,
        holdout,
        holdout_accuracy,
        seed,
    })
}

/// A surrogate trained on the nodes whose role is in `keep_roles`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubpopulationModel {
    pub model: SurrogateForest,
    /// Original node index of each retained row.
    pub rows: Vec<usize>,
    pub features: LogOrbitMatrix,
    pub labels: Vec<usize>,
}

pub fn refit_on_subpopulation(
    features: &LogOrbitMatrix,
    labels: &[usize],
    keep_roles: &[usize],
    config: &SurrogateConfig,
    seed: u64,
) -> Result<SubpopulationModel> {
    if labels.len() != features.node_count() {
        return Err(Error::Dimension(format!(
            "{} labels for {} feature rows",
            labels.len(),
            features.node_count()
        )));
    }
    let keep: BTreeSet<usize> = keep_roles.iter().copied().collect();
    let rows: Vec<usize> = (0..labels.len())
        .filter(|&i| keep.contains(&labels[i]))
        .collect();
    let populated = rows
        .iter()
        .map(|&i| labels[i])
        .collect::<BTreeSet<_>>()
        .len();
    if populated < 2 {
        return Err(Error::TooFewClasses(populated));
    }
    let sub = features.select_rows(&rows);
    let sub_labels: Vec<usize> = rows.iter().map(|&i| labels[i]).collect();
    let model = train_surrogate(&sub, &sub_labels, config, seed)?;
    Ok(SubpopulationModel {
        model,
        rows,
        features: sub,
        labels: sub_labels,
    })
}
