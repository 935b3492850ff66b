use nalgebra::DMatrix;
use ndarray::Array2;
use rayon::prelude::*;

use super::EmbeddingMatrix;
use crate::graph::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphWaveConfig {
    pub scales: Vec<f64>,
    pub sample_points: usize,
    pub t_max: f64,
    /// Requested width; must equal `2 * scales.len() * sample_points`.
    pub d: usize,
    /// Components above this size use the Chebyshev approximation.
    pub exact_max_nodes: usize,
    pub chebyshev_order: usize,
}

impl Default for GraphWaveConfig {
    fn default() -> Self {
        GraphWaveConfig {
            scales: vec![0.5, 1.5],
            sample_points: 32,
            t_max: 100.0,
            d: 128,
            exact_max_nodes: 2000,
            chebyshev_order: 30,
        }
    }
}

/// Heat-kernel wavelet characteristic-function embedding.
///
/// Columns are laid out scale-major, then by sample point, as (Re, Im) pairs.
/// Each connected component is processed on its own and its characteristic
/// functions are averaged over that component's nodes.
pub fn graphwave_embed(graph: &Graph, config: &GraphWaveConfig) -> Result<EmbeddingMatrix> {
    let expected = 2 * config.scales.len() * config.sample_points;
    if config.d != expected {
        return Err(Error::InvalidParameter(format!(
            "d = {} but 2 x {} scales x {} sample points = {expected}",
            config.d,
            config.scales.len(),
            config.sample_points
        )));
    }
    if config.scales.is_empty() || config.scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidParameter(
            "scales must be positive and finite".into(),
        ));
    }
    if config.sample_points < 2 || config.t_max.is_nan() || config.t_max <= 0.0 {
        return Err(Error::InvalidParameter(
            "need at least 2 sample points and t_max > 0".into(),
        ));
    }

    let n = graph.node_count();
    let mut out = Array2::<f64>::zeros((n, config.d));
    for component in graph.components() {
        let rows = if component.len() <= config.exact_max_nodes {
            exact_component(graph, &component, config)?
        } else {
            chebyshev_component(graph, &component, config)
        };
        for (local, &v) in component.iter().enumerate() {
            out.row_mut(v)
                .as_slice_mut()
                .expect("standard layout")
                .copy_from_slice(&rows[local]);
        }
    }
    EmbeddingMatrix::new(out, "graphwave")
}

/// Characteristic function samples for one wavelet column, appended to `row`.
fn characteristic(coeffs: &[f64], config: &GraphWaveConfig, row: &mut Vec<f64>) {
    let m = coeffs.len() as f64;
    let dt = config.t_max / (config.sample_points - 1) as f64;
    let mut re = vec![0.0; config.sample_points];
    let mut im = vec![0.0; config.sample_points];
    for &psi in coeffs {
        let (s, c) = (dt * psi).sin_cos();
        let (mut zr, mut zi) = (1.0, 0.0);
        for j in 0..config.sample_points {
            re[j] += zr;
            im[j] += zi;
            (zr, zi) = (zr * c - zi * s, zr * s + zi * c);
        }
    }
    for j in 0..config.sample_points {
        row.push(re[j] / m);
        row.push(im[j] / m);
    }
}

fn local_index(graph: &Graph, component: &[usize]) -> Vec<usize> {
    let mut local = vec![usize::MAX; graph.node_count()];
    for (i, &v) in component.iter().enumerate() {
        local[v] = i;
    }
    local
}

fn exact_component(
    graph: &Graph,
    component: &[usize],
    config: &GraphWaveConfig,
) -> Result<Vec<Vec<f64>>> {
    let k = component.len();
    let local = local_index(graph, component);
    let mut lap = DMatrix::<f64>::zeros(k, k);
    for (i, &v) in component.iter().enumerate() {
        lap[(i, i)] = graph.degree(v) as f64;
        for &u in graph.neighbors(v) {
            lap[(i, local[u])] = -1.0;
        }
    }
    let eigen = nalgebra::SymmetricEigen::try_new(lap, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen(format!("no convergence on a {k}-node component")))?;
    let u = &eigen.eigenvectors;
    let kernels: Vec<DMatrix<f64>> = config
        .scales
        .iter()
        .map(|&s| {
            let mut scaled = u.clone();
            for (j, &lambda) in eigen.eigenvalues.iter().enumerate() {
                scaled.column_mut(j).scale_mut((-s * lambda.max(0.0)).exp());
            }
            &scaled * u.transpose()
        })
        .collect();
    Ok((0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(config.d);
            for psi in &kernels {
                characteristic(psi.column(i).as_slice(), config, &mut row);
            }
            row
        })
        .collect())
}

/// Chebyshev coefficients of `x -> exp(-s * alpha * (x + 1))` on [-1, 1].
fn chebyshev_coefficients(s: f64, alpha: f64, order: usize) -> Vec<f64> {
    let nodes = 4 * (order + 1);
    let f: Vec<f64> = (0..nodes)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64;
            (-s * alpha * (theta.cos() + 1.0)).exp()
        })
        .collect();
    (0..=order)
        .map(|k| {
            let sum: f64 = f
                .iter()
                .enumerate()
                .map(|(j, fj)| {
                    fj * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / nodes as f64).cos()
                })
                .sum();
            let c = 2.0 * sum / nodes as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

fn chebyshev_component(
    graph: &Graph,
    component: &[usize],
    config: &GraphWaveConfig,
) -> Vec<Vec<f64>> {
    let k = component.len();
    let local = local_index(graph, component);
    // Anderson-Morley bound on the largest Laplacian eigenvalue.
    let lambda_max = component
        .iter()
        .flat_map(|&v| {
            graph
                .neighbors(v)
                .iter()
                .map(move |&u| graph.degree(u) + graph.degree(v))
        })
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let alpha = lambda_max / 2.0;
    let coefficients: Vec<Vec<f64>> = config
        .scales
        .iter()
        .map(|&s| chebyshev_coefficients(s, alpha, config.chebyshev_order))
        .collect();
    let adjacency: Vec<Vec<usize>> = component
        .iter()
        .map(|&v| graph.neighbors(v).iter().map(|&u| local[u]).collect())
        .collect();
    // y = (L / alpha - I) x
    let shifted = |x: &[f64], y: &mut [f64]| {
        for i in 0..k {
            let mut acc = adjacency[i].len() as f64 * x[i];
            for &j in &adjacency[i] {
                acc -= x[j];
            }
            y[i] = acc / alpha - x[i];
        }
    };

    (0..k)
        .into_par_iter()
        .map(|i| {
            let mut prev = vec![0.0; k];
            prev[i] = 1.0;
            let mut cur = vec![0.0; k];
            shifted(&prev, &mut cur);
            let mut next = vec![0.0; k];
            let mut sums: Vec<Vec<f64>> = coefficients
                .iter()
                .map(|c| {
                    let mut acc = vec![0.0; k];
                    acc[i] = c[0];
                    if c.len() > 1 {
                        for (a, x) in acc.iter_mut().zip(&cur) {
                            *a += c[1] * x;
                        }
                    }
                    acc
                })
                .collect();
            for order in 2..=config.chebyshev_order {
                shifted(&cur, &mut next);
                for (nx, px) in next.iter_mut().zip(&prev) {
                    *nx = 2.0 * *nx - px;
                }
                for (acc, c) in sums.iter_mut().zip(&coefficients) {
                    for (a, x) in acc.iter_mut().zip(&next) {
                        *a += c[order] * x;
                    }
                }
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
            let mut row = Vec::with_capacity(config.d);
            for psi in &sums {
                characteristic(psi, config, &mut row);
            }
            row
        })
        .collect()
}
