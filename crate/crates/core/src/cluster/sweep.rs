use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::{kmeans, silhouette_in_orbit_space, DEFAULT_SAMPLE_CAP};
use crate::census::LogOrbitMatrix;
use crate::embed::EmbeddingMatrix;
use crate::seeds::{derive, Stage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_range: RangeInclusive<usize>,
    pub sample_cap: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k_range: 2..=19,
            sample_cap: DEFAULT_SAMPLE_CAP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub k: usize,
    pub silhouette: f64,
    pub sampled: bool,
    pub k_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SilhouetteSweep {
    pub rows: Vec<SweepRow>,
}

impl SilhouetteSweep {
    /// The k with the highest silhouette for `method`; earliest k on ties.
    pub fn best_k(&self, method: &str) -> Option<usize> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .fold(None::<&SweepRow>, |best, r| match best {
                Some(b) if b.silhouette >= r.silhouette => Some(b),
                _ => Some(r),
            })
            .map(|r| r.k)
    }
}

/// k-means plus orbit-space silhouette for every (embedding, k) pair.
///
/// The k-means seed for embedding `i` and cluster count `k` is derived from
/// the master seed, so a single cell can be recomputed on its own.
pub fn sweep(
    embeddings: &[EmbeddingMatrix],
    orbit_features: &LogOrbitMatrix,
    config: &SweepConfig,
) -> Result<SilhouetteSweep> {
    if embeddings.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one embedding".into(),
        ));
    }
    if config.k_range.is_empty() || *config.k_range.start() < 2 {
        return Err(Error::InvalidParameter(format!(
            "k range {:?} must be non-empty and start at 2 or above",
            config.k_range
        )));
    }
    for e in embeddings {
        if e.node_count() != orbit_features.node_count() {
            return Err(Error::Dimension(format!(
                "embedding `{}` has {} rows, orbit matrix has {}",
                e.method_tag,
                e.node_count(),
                orbit_features.node_count()
            )));
        }
    }
    let cells: Vec<(usize, usize)> = (0..embeddings.len())
        .flat_map(|m| config.k_range.clone().map(move |k| (m, k)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(m, k)| {
            let seed = cell_seed(config.seed, m, k);
            let assignment = kmeans(&embeddings[m], k, seed)?;
            let s =
                silhouette_in_orbit_space(&assignment, orbit_features, config.sample_cap, seed)?;
            Ok(SweepRow {
                method: embeddings[m].method_tag.clone(),
                k,
                silhouette: s.score,
                sampled: s.sampled,
                k_effective: assignment.k_effective,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SilhouetteSweep { rows })
}

/// Seed used by [`sweep`] for embedding index `method` and cluster count `k`.
pub fn cell_seed(master: u64, method: usize, k: usize) -> u64 {
    derive(master, Stage::Cluster, ((method as u64) << 32) | k as u64)
}

/// CSV `method,k,silhouette,sampled`.
pub fn write_sweep_csv<W: Write>(sweep: &SilhouetteSweep, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "k", "silhouette", "sampled"])?;
    for r in &sweep.rows {
        w.write_record([
            r.method.clone(),
            r.k.to_string(),
            r.silhouette.to_string(),
            r.sampled.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<sweep csv>", e))?;
    Ok(())
}
