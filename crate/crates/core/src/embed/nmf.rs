use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NmfConfig {
    pub rank: usize,
    pub max_iter: usize,
    /// Stop once the relative drop in reconstruction error falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for NmfConfig {
    fn default() -> Self {
        NmfConfig {
            rank: 16,
            max_iter: 500,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmfResult {
    pub g: Array2<f64>,
    pub h: Array2<f64>,
    /// Weighted Frobenius error after initialisation and after every update.
    pub error_history: Vec<f64>,
    pub converged: bool,
}

/// Row-weighted multiplicative-update NMF: minimises
/// `sum_r w_r * |F_r - G_r H|^2` over non-negative `G`, `H`.
///
/// A weight of `w` is equivalent to repeating the row `w` times with tied
/// factor rows.
pub fn nmf(f: &Array2<f64>, weights: &[f64], config: &NmfConfig) -> Result<NmfResult> {
    let (rows, cols) = f.dim();
    if weights.len() != rows {
        return Err(Error::Dimension(format!(
            "{} weights for {rows} rows",
            weights.len()
        )));
    }
    if config.rank < 1 || config.rank > cols {
        return Err(Error::InvalidParameter(format!(
            "rank {} must lie in [1, {cols}] (feature count)",
            config.rank
        )));
    }
    if f.iter().any(|&x| x < 0.0 || !x.is_finite()) || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::InvalidParameter(
            "NMF input must be finite and non-negative".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut unit = || 1.0 - rng.gen::<f64>();
    let mut g = Array2::from_shape_simple_fn((rows, config.rank), &mut unit);
    let mut h = Array2::from_shape_simple_fn((config.rank, cols), &mut unit);
    let w = Array1::from(weights.to_vec()).insert_axis(Axis(1));
    let wf = f * &w;

    let mut history = vec![weighted_error(f, &w, &g, &h)];
    let mut converged = false;
    for _ in 0..config.max_iter {
        let num = g.t().dot(&wf);
        let den = g.t().dot(&(&g.dot(&h) * &w));
        update(&mut h, &num, &den);
        let num = f.dot(&h.t());
        let den = g.dot(&h.dot(&h.t()));
        update(&mut g, &num, &den);

        let err = weighted_error(f, &w, &g, &h);
        let prev = *history.last().expect("seeded with the initial error");
        history.push(err);
        if prev <= 0.0 || (prev - err) / prev < config.tolerance {
            converged = true;
            break;
        }
    }
    Ok(NmfResult {
        g,
        h,
        error_history: history,
        converged,
    })
}

fn update(x: &mut Array2<f64>, num: &Array2<f64>, den: &Array2<f64>) {
    ndarray::Zip::from(x)
        .and(num)
        .and(den)
        .for_each(|x, &n, &d| {
            if d > 0.0 {
                *x *= n / d;
            }
        });
}

fn weighted_error(f: &Array2<f64>, w: &Array2<f64>, g: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let residual = f - &g.dot(h);
    ((&residual * &residual) * w).sum().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn error_never_increases_and_factors_stay_non_negative() {
        let f = array![
            [1.0, 0.0, 2.0],
            [0.5, 3.0, 0.0],
            [2.0, 1.0, 1.0],
            [0.0, 0.0, 4.0]
        ];
        let config = NmfConfig {
            rank: 2,
            seed: 9,
            ..Default::default()
        };
        let r = nmf(&f, &[1.0, 2.0, 1.0, 3.0], &config).unwrap();
        for pair in r.error_history.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{pair:?}");
        }
        assert!(r.g.iter().chain(r.h.iter()).all(|&x| x >= 0.0));
    }

    #[test]
    fn exact_low_rank_input_is_recovered() {
        let g0 = array![[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let h0 = array![[1.0, 2.0, 0.0], [0.0, 1.0, 3.0]];
        let f = g0.dot(&h0);
        let config = NmfConfig {
            rank: 2,
            max_iter: 5000,
            tolerance: 0.0,
            seed: 1,
        };
        let r = nmf(&f, &[1.0; 3], &config).unwrap();
        assert!(*r.error_history.last().unwrap() < 1e-3);
    }

    #[test]
    fn weights_match_repeated_rows() {
        let f = array![[1.0, 2.0], [3.0, 0.5]];
        let config = NmfConfig {
            rank: 1,
            seed: 4,
            ..Default::default()
        };
        let weighted = nmf(&f, &[2.0, 1.0], &config).unwrap();
        let g = &weighted.g;
        let expanded = array![[g[[0, 0]]], [g[[0, 0]]], [g[[1, 0]]]];
        let full = array![[1.0, 2.0], [1.0, 2.0], [3.0, 0.5]];
        let resid = &full - &expanded.dot(&weighted.h);
        let direct = (&resid * &resid).sum().sqrt();
        assert!((direct - weighted.error_history.last().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rank_above_feature_count_is_rejected() {
        let f = array![[1.0, 2.0]];
        let config = NmfConfig {
            rank: 3,
            ..Default::default()
        };
        assert!(matches!(
            nmf(&f, &[1.0], &config),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn hitting_the_iteration_cap_is_flagged() {
        let f = array![[1.0, 0.0, 2.0], [0.5, 3.0, 0.0], [2.0, 1.0, 1.0]];
        let config = NmfConfig {
            rank: 2,
            max_iter: 2,
            tolerance: 0.0,
            seed: 0,
        };
        let r = nmf(&f, &[1.0; 3], &config).unwrap();
        assert!(!r.converged);
        assert_eq!(r.error_history.len(), 3);
    }
}
