use std::collections::BTreeMap;

use ndarray::Array2;
use ordered_float::OrderedFloat;

use super::{nmf, refex_features, EmbeddingMatrix, NmfConfig, RefexConfig, RefexFeatureMatrix};
use crate::graph::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RolxConfig {
    pub rank: usize,
    pub refex: RefexConfig,
    pub max_iter: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for RolxConfig {
    fn default() -> Self {
        let nmf = NmfConfig::default();
        RolxConfig {
            rank: nmf.rank,
            refex: RefexConfig::default(),
            max_iter: nmf.max_iter,
            tolerance: nmf.tolerance,
            seed: nmf.seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RolxEmbedding {
    /// Node-by-role memberships, rows normalised to unit L1 norm.
    pub embedding: EmbeddingMatrix,
    pub features: RefexFeatureMatrix,
    /// Role-by-feature factor on the max-scaled features.
    pub h: Array2<f64>,
    pub error_history: Vec<f64>,
    /// False when NMF stopped at `max_iter`; the last iterate is returned.
    pub converged: bool,
}

/// RolX: NMF of max-scaled ReFeX features.
///
/// Nodes with identical feature rows share one factor row, which makes the
/// result exactly equivariant under relabeling for a fixed seed.
pub fn rolx_embed(graph: &Graph, config: &RolxConfig) -> Result<RolxEmbedding> {
    if config.rank < 2 {
        return Err(Error::InvalidParameter(
            "RolX rank must be at least 2".into(),
        ));
    }
    let features = refex_features(graph, &config.refex)?;
    let (n, f) = features.features.dim();
    if config.rank > f {
        return Err(Error::InvalidParameter(format!(
            "rank {} exceeds the {f} retained ReFeX features",
            config.rank
        )));
    }
    let mut scaled = features.features.clone();
    for mut column in scaled.columns_mut() {
        let max = column.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            column.mapv_inplace(|x| x / max);
        }
    }

    let mut unique: BTreeMap<Vec<OrderedFloat<f64>>, usize> = BTreeMap::new();
    for row in scaled.rows() {
        *unique
            .entry(row.iter().map(|&x| OrderedFloat(x)).collect())
            .or_default() += 1;
    }
    let slot: BTreeMap<&Vec<OrderedFloat<f64>>, usize> =
        unique.keys().enumerate().map(|(i, k)| (k, i)).collect();
    let mut compact = Array2::zeros((unique.len(), f));
    for (i, key) in unique.keys().enumerate() {
        for (j, x) in key.iter().enumerate() {
            compact[[i, j]] = x.0;
        }
    }
    let weights: Vec<f64> = unique.values().map(|&c| c as f64).collect();
    let result = nmf(
        &compact,
        &weights,
        &NmfConfig {
            rank: config.rank,
            max_iter: config.max_iter,
            tolerance: config.tolerance,
            seed: config.seed,
        },
    )?;

    let mut vectors = Array2::zeros((n, config.rank));
    for (v, row) in scaled.rows().into_iter().enumerate() {
        let key: Vec<OrderedFloat<f64>> = row.iter().map(|&x| OrderedFloat(x)).collect();
        let g = result.g.row(slot[&key]);
        let total: f64 = g.sum();
        for (k, &x) in g.iter().enumerate() {
            vectors[[v, k]] = if total > 0.0 { x / total } else { 0.0 };
        }
    }
    Ok(RolxEmbedding {
        embedding: EmbeddingMatrix::new(vectors, "rolx")?,
        features,
        h: result.h,
        error_history: result.error_history,
        converged: result.converged,
    })
}
