use ndarray::Array2;

use crate::graph::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RefexConfig {
    pub depth: usize,
    /// Columns whose absolute Pearson correlation with an already kept column
    /// exceeds this are dropped.
    pub prune_threshold: f64,
}

impl Default for RefexConfig {
    fn default() -> Self {
        RefexConfig {
            depth: 2,
            prune_threshold: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefexFeatureMatrix {
    pub features: Array2<f64>,
    pub names: Vec<String>,
    /// Deepest generation that contributed at least one kept column.
    pub generation: usize,
}

/// Recursive structural features: degree and egonet edge counts, then
/// neighbour means and sums of the previous generation, pruned for
/// near-duplicates after every generation.
pub fn refex_features(graph: &Graph, config: &RefexConfig) -> Result<RefexFeatureMatrix> {
    if !(0.0..=1.0).contains(&config.prune_threshold) {
        return Err(Error::InvalidParameter(
            "prune threshold must lie in [0, 1]".into(),
        ));
    }
    let mut kept: Vec<(String, Vec<f64>)> = Vec::new();
    let mut frontier: Vec<(String, Vec<f64>)> = Vec::new();
    for (name, column) in base_features(graph) {
        if admit(&column, &kept, config.prune_threshold) {
            kept.push((name.clone(), column.clone()));
            frontier.push((name, column));
        }
    }
    let mut generation = 0;
    for g in 1..=config.depth {
        let mut next = Vec::new();
        for (name, column) in &frontier {
            let (mean, sum) = aggregate(graph, column);
            for (agg, values) in [("mean", mean), ("sum", sum)] {
                if admit(&values, &kept, config.prune_threshold) {
                    let label = format!("{agg}({name})");
                    kept.push((label.clone(), values.clone()));
                    next.push((label, values));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        generation = g;
        frontier = next;
    }
    let n = graph.node_count();
    let mut features = Array2::zeros((n, kept.len()));
    for (j, (_, column)) in kept.iter().enumerate() {
        for (v, &x) in column.iter().enumerate() {
            features[[v, j]] = x;
        }
    }
    Ok(RefexFeatureMatrix {
        features,
        names: kept.into_iter().map(|(name, _)| name).collect(),
        generation,
    })
}

fn base_features(graph: &Graph) -> Vec<(String, Vec<f64>)> {
    let n = graph.node_count();
    let mut degree = Vec::with_capacity(n);
    let mut internal = Vec::with_capacity(n);
    let mut boundary = Vec::with_capacity(n);
    for v in 0..n {
        let nbrs = graph.neighbors(v);
        let mut inside = nbrs.len();
        let mut volume = nbrs.len();
        for (i, &u) in nbrs.iter().enumerate() {
            volume += graph.degree(u);
            inside += nbrs[i + 1..]
                .iter()
                .filter(|&&w| graph.has_edge(u, w))
                .count();
        }
        degree.push(nbrs.len() as f64);
        internal.push(inside as f64);
        boundary.push((volume - 2 * inside) as f64);
    }
    vec![
        ("degree".into(), degree),
        ("egonet_internal".into(), internal),
        ("egonet_boundary".into(), boundary),
    ]
}

/// Neighbour mean and sum; values are summed in ascending order so the
/// result does not depend on node numbering.
fn aggregate(graph: &Graph, column: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut buf = Vec::new();
    (0..graph.node_count())
        .map(|v| {
            buf.clear();
            buf.extend(graph.neighbors(v).iter().map(|&u| column[u]));
            buf.sort_by(f64::total_cmp);
            let sum: f64 = buf.iter().sum();
            let mean = if buf.is_empty() {
                0.0
            } else {
                sum / buf.len() as f64
            };
            (mean, sum)
        })
        .unzip()
}

/// Constant columns have no correlation and are always admitted.
fn admit(column: &[f64], kept: &[(String, Vec<f64>)], threshold: f64) -> bool {
    kept.iter()
        .all(|(_, other)| pearson(column, other).is_none_or(|r| r.abs() <= threshold))
}

/// Pearson correlation computed over the sorted multiset of value pairs, so
/// it is exactly invariant under node relabeling. `None` for constant input.
fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
