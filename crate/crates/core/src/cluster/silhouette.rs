use std::collections::BTreeMap;

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::RoleAssignment;
use crate::census::LogOrbitMatrix;
use crate::{Error, Result};

pub const DEFAULT_SAMPLE_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Silhouette {
    pub score: f64,
    /// True when the score was computed on a uniform node sample.
    pub sampled: bool,
    pub nodes_used: usize,
}

/// Mean silhouette of `labels` under Euclidean distance on the rows of
/// `data`. Members of singleton clusters contribute 0.
///
/// Above `sample_cap` rows a seeded uniform sample of `sample_cap` rows is
/// scored against itself.
pub fn silhouette(
    data: ArrayView2<f64>,
    labels: &[usize],
    sample_cap: usize,
    seed: u64,
) -> Result<Silhouette> {
    let n = data.nrows();
    if labels.len() != n {
        return Err(Error::Dimension(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    if sample_cap < 2 {
        return Err(Error::InvalidParameter(
            "sample cap must be at least 2".into(),
        ));
    }
    let (rows, sampled) = if n > sample_cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = sample(&mut rng, n, sample_cap).into_vec();
        idx.sort_unstable();
        (idx, true)
    } else {
        ((0..n).collect(), false)
    };

    let mut dense: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &rows {
        let next = dense.len();
        dense.entry(labels[r]).or_insert(next);
    }
    let k = dense.len();
    if k < 2 {
        return Err(Error::Degenerate(
            "silhouette needs at least two clusters; all nodes share one".into(),
        ));
    }
    let cluster: Vec<usize> = rows.iter().map(|&r| dense[&labels[r]]).collect();
    let mut sizes = vec![0usize; k];
    for &c in &cluster {
        sizes[c] += 1;
    }

    let scores: Vec<f64> = (0..rows.len())
        .into_par_iter()
        .map(|i| {
            let own = cluster[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let x = data.row(rows[i]);
            let mut sums = vec![0.0; k];
            for (j, &r) in rows.iter().enumerate() {
                if i != j {
                    let d: f64 = x
                        .iter()
                        .zip(data.row(r).iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    sums[cluster[j]] += d;
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .collect();
    Ok(Silhouette {
        score: scores.iter().sum::<f64>() / scores.len() as f64,
        sampled,
        nodes_used: rows.len(),
    })
}

/// Silhouette of a role assignment measured on log orbit vectors.
pub fn silhouette_in_orbit_space(
    assignment: &RoleAssignment,
    orbit_features: &LogOrbitMatrix,
    sample_cap: usize,
    seed: u64,
) -> Result<Silhouette> {
    silhouette(
        orbit_features.values.view(),
        &assignment.labels,
        sample_cap,
        seed,
    )
}
