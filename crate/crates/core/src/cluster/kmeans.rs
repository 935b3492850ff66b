use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::embed::EmbeddingMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansConfig {
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tolerance: f64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            max_iter: 300,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoleAssignment {
    /// Cluster per node, numbered by first appearance in node order.
    pub labels: Vec<usize>,
    pub k: usize,
    /// Number of non-empty clusters; below `k` only for degenerate input.
    pub k_effective: usize,
    pub degenerate: bool,
    pub method_tag: String,
    pub seed: u64,
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squares after each assignment step.
    pub wcss_history: Vec<f64>,
    pub converged: bool,
}

impl RoleAssignment {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_effective];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

pub fn kmeans(embedding: &EmbeddingMatrix, k: usize, seed: u64) -> Result<RoleAssignment> {
    let mut a = kmeans_points(embedding.vectors.view(), k, seed, &KmeansConfig::default())?;
    a.method_tag = embedding.method_tag.clone();
    Ok(a)
}

/// Lloyd iterations from a k-means++ start.
///
/// A centroid left without points is moved onto the point farthest from its
/// own centroid. If every point coincides with its centroid the cluster stays
/// empty and the result is marked degenerate.
pub fn kmeans_points(
    data: ArrayView2<f64>,
    k: usize,
    seed: u64,
    config: &KmeansConfig,
) -> Result<RoleAssignment> {
    let n = data.nrows();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k}; need k >= 2")));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds {n} points"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus(data, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut history = Vec::new();
    let mut converged = false;

    for _ in 0..config.max_iter {
        let nearest: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .map(|i| nearest(data.row(i), &centroids))
            .collect();
        history.push(nearest.iter().map(|p| p.1).sum());
        for (l, p) in labels.iter_mut().zip(&nearest) {
            *l = p.0;
        }

        let mut sums = Array2::<f64>::zeros(centroids.dim());
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            sums.row_mut(l).scaled_add(1.0, &data.row(i));
        }
        let mut moved: f64 = 0.0;
        for (c, &count) in counts.iter().enumerate() {
            let next = if count > 0 {
                sums.row(c).mapv(|x| x / count as f64)
            } else {
                let (far, dist) = nearest.iter().enumerate().fold((0, -1.0), |best, (i, p)| {
                    if p.1 > best.1 {
                        (i, p.1)
                    } else {
                        best
                    }
                });
                if dist > 0.0 {
                    data.row(far).to_owned()
                } else {
                    centroids.row(c).to_owned()
                }
            };
            moved = moved.max(squared(next.view(), centroids.row(c)).sqrt());
            centroids.row_mut(c).assign(&next);
        }
        if moved < config.tolerance {
            converged = true;
            break;
        }
    }

    // Relabel by first appearance and drop empty clusters.
    let mut remap = vec![usize::MAX; k];
    let mut order = Vec::new();
    for l in labels.iter_mut() {
        if remap[*l] == usize::MAX {
            remap[*l] = order.len();
            order.push(*l);
        }
        *l = remap[*l];
    }
    let mut kept = Array2::zeros((order.len(), data.ncols()));
    for (new, &old) in order.iter().enumerate() {
        kept.row_mut(new).assign(&centroids.row(old));
    }
    Ok(RoleAssignment {
        labels,
        k,
        k_effective: order.len(),
        degenerate: order.len() < k,
        method_tag: String::new(),
        seed,
        centroids: kept,
        wcss_history: history,
        converged,
    })
}

fn plus_plus(data: ArrayView2<f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = data.nrows();
    let mut centroids = Array2::zeros((k, data.ncols()));
    centroids.row_mut(0).assign(&data.row(rng.gen_range(0..n)));
    let mut dist: Vec<f64> = (0..n)
        .map(|i| squared(data.row(i), centroids.row(0)))
        .collect();
    for c in 1..k {
        let pick = match WeightedIndex::new(&dist) {
            Ok(w) => w.sample(rng),
            // Every point already sits on a centroid.
            Err(_) => rng.gen_range(0..n),
        };
        centroids.row_mut(c).assign(&data.row(pick));
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(squared(data.row(i), centroids.row(c)));
        }
    }
    centroids
}

fn nearest(x: ArrayView1<f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.rows().into_iter().enumerate() {
        let d = squared(x, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn squared(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_bad_k() {
        let data = array![[0.0], [1.0]];
        let config = KmeansConfig::default();
        assert!(kmeans_points(data.view(), 1, 0, &config).is_err());
        assert!(kmeans_points(data.view(), 3, 0, &config).is_err());
    }

    #[test]
    fn identical_points_are_degenerate() {
        let data = Array2::from_elem((6, 2), 3.0);
        let a = kmeans_points(data.view(), 2, 1, &KmeansConfig::default()).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.k_effective, 1);
        assert!(a.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn labels_follow_first_appearance() {
        let data = array![[10.0], [0.0], [10.1], [0.1]];
        let a = kmeans_points(data.view(), 2, 3, &KmeansConfig::default()).unwrap();
        assert_eq!(a.labels, vec![0, 1, 0, 1]);
        assert_eq!(a.cluster_sizes(), vec![2, 2]);
    }
}
