use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::seeds::splitmix64;
use crate::{Error, Result};

/// Leaf probabilities are stored in this fixed-point scale so that summing
/// over trees is exact and independent of tree order.
const ONE: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestConfig {
    pub trees: usize,
    pub min_leaf: usize,
    /// Features drawn per split; `None` means `floor(sqrt(f))`.
    pub mtry: Option<usize>,
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 200,
            min_leaf: 5,
            mtry: None,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn leaf(&self, x: ArrayView1<f64>) -> &[u64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf(p) => return p,
            }
        }
    }

    /// Whether any split in this tree tests `feature`.
    pub fn uses(&self, feature: usize) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n, Node::Split { feature: f, .. } if *f == feature))
    }
}

/// Bagged CART classifier with Gini splits on classes `0..n_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl RandomForest {
    /// Trains one tree per derived seed, in parallel; tree `t` only depends on
    /// `seed` and `t`.
    pub fn fit(
        x: ArrayView2<f64>,
        y: &[usize],
        n_classes: usize,
        config: &ForestConfig,
        seed: u64,
    ) -> Result<Self> {
        let (n, f) = x.dim();
        if y.len() != n {
            return Err(Error::Dimension(format!("{} labels for {n} rows", y.len())));
        }
        if n == 0 || f == 0 {
            return Err(Error::InvalidParameter("empty training data".into()));
        }
        if config.trees == 0 || config.min_leaf == 0 {
            return Err(Error::InvalidParameter(
                "trees and min_leaf must be positive".into(),
            ));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::InvalidParameter(format!(
                "class {bad} outside 0..{n_classes}"
            )));
        }
        let mtry = config
            .mtry
            .unwrap_or(((f as f64).sqrt() as usize).max(1))
            .clamp(1, f);
        let trees = (0..config.trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(t as u64)));
                let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                let mut grower = Grower {
                    x,
                    y,
                    n_classes,
                    mtry,
                    min_leaf: config.min_leaf,
                    max_depth: config.max_depth.unwrap_or(usize::MAX),
                    rng,
                    nodes: Vec::new(),
                };
                grower.grow(sample, 0);
                Tree {
                    nodes: grower.nodes,
                }
            })
            .collect();
        Ok(RandomForest {
            trees,
            n_features: f,
            n_classes,
        })
    }

    /// Summed fixed-point leaf probabilities over all trees.
    pub fn votes(&self, x: ArrayView1<f64>) -> Vec<u64> {
        let mut total = vec![0u64; self.n_classes];
        for tree in &self.trees {
            for (t, p) in total.iter_mut().zip(tree.leaf(x)) {
                *t += p;
            }
        }
        total
    }

    pub fn predict_proba_row(&self, x: ArrayView1<f64>) -> Vec<f64> {
        let scale = (ONE as f64) * self.trees.len() as f64;
        self.votes(x)
            .into_iter()
            .map(|v| v as f64 / scale)
            .collect()
    }

    /// Most probable class; the lowest class wins ties.
    pub fn predict_row(&self, x: ArrayView1<f64>) -> usize {
        argmax_lowest(&self.votes(x))
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Vec<usize> {
        (0..x.nrows())
            .into_par_iter()
            .map(|i| self.predict_row(x.row(i)))
            .collect()
    }

    pub fn predict_proba(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let rows: Vec<Vec<f64>> = (0..x.nrows())
            .into_par_iter()
            .map(|i| self.predict_proba_row(x.row(i)))
            .collect();
        Array2::from_shape_fn((x.nrows(), self.n_classes), |(i, c)| rows[i][c])
    }

    /// Indices of the features that appear in at least one split.
    pub fn used_features(&self) -> Vec<usize> {
        (0..self.n_features)
            .filter(|&j| self.trees.iter().any(|t| t.uses(j)))
            .collect()
    }
}

pub(crate) fn argmax_lowest(votes: &[u64]) -> usize {
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    best
}

struct Grower<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    mtry: usize,
    min_leaf: usize,
    max_depth: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Grower<'_> {
    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = self.counts(&rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || rows.len() < 2 * self.min_leaf {
            self.nodes.push(self.leaf(&counts, rows.len()));
            return id;
        }
        let Some(split) = self.best_split(&rows) else {
            self.nodes.push(self.leaf(&counts, rows.len()));
            return id;
        };
        self.nodes.push(Node::Leaf(Vec::new()));
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&i| self.x[[i, split.feature]] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn counts(&self, rows: &[usize]) -> Vec<u64> {
        let mut c = vec![0u64; self.n_classes];
        for &i in rows {
            c[self.y[i]] += 1;
        }
        c
    }

    fn leaf(&self, counts: &[u64], n: usize) -> Node {
        Node::Leaf(
            counts
                .iter()
                .map(|&c| ((c as u128 * ONE as u128) / n as u128) as u64)
                .collect(),
        )
    }

    /// Draws `mtry` features and keeps drawing while none of them admits a
    /// split with `min_leaf` rows on both sides.
    fn best_split(&mut self, rows: &[usize]) -> Option<Split> {
        let mut features: Vec<usize> = (0..self.x.ncols()).collect();
        features.shuffle(&mut self.rng);
        let mut best: Option<Split> = None;
        for (tried, &feature) in features.iter().enumerate() {
            if tried >= self.mtry && best.is_some() {
                break;
            }
            if let Some(s) = self.best_split_on(rows, feature) {
                if best.as_ref().is_none_or(|b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        best
    }

    /// Maximises `S_L / n_L + S_R / n_R` with `S = sum of squared class
    /// counts`, which is equivalent to minimising weighted Gini impurity.
    fn best_split_on(&self, rows: &[usize], feature: usize) -> Option<Split> {
        let mut order: Vec<(f64, usize)> = rows
            .iter()
            .map(|&i| (self.x[[i, feature]], self.y[i]))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = order.len();
        let mut right = vec![0u64; self.n_classes];
        for &(_, c) in &order {
            right[c] += 1;
        }
        let mut left = vec![0u64; self.n_classes];
        let mut s_left: u64 = 0;
        let mut s_right: u64 = right.iter().map(|c| c * c).sum();
        let mut best: Option<Split> = None;
        for i in 0..n - 1 {
            let c = order[i].1;
            s_left += 2 * left[c] + 1;
            left[c] += 1;
            s_right -= 2 * right[c] - 1;
            right[c] -= 1;
            let (nl, nr) = (i + 1, n - i - 1);
            if nl < self.min_leaf || nr < self.min_leaf || order[i].0 == order[i + 1].0 {
                continue;
            }
            let score = s_left as f64 / nl as f64 + s_right as f64 / nr as f64;
            if best.as_ref().is_none_or(|b| score > b.score) {
                let (a, b) = (order[i].0, order[i + 1].0);
                let mid = a + (b - a) / 2.0;
                let threshold = if mid < b { mid } else { a };
                best = Some(Split {
                    feature,
                    threshold,
                    score,
                });
            }
        }
        best
    }
}
