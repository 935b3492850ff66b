//! Graphlet orbit census: how often each node occupies each of the 73 orbits
//! of connected graphlets on 2–5 nodes.
//!
//! [`count_orbits`] enumerates every connected induced subgraph of at most
//! five nodes exactly once (ESU-style extension from its smallest node) and
//! classifies it through a precomputed mask-to-orbit table.
//! [`count_orbits_bruteforce`] is an independent differential oracle.

mod brute;
mod count;
pub mod graphlets;
mod io;

pub use brute::{count_orbits_bruteforce, DEFAULT_BRUTEFORCE_LIMIT};
pub use count::{count_orbits, count_orbits_with, CensusConfig};
pub use graphlets::{Graphlet, GRAPHLETS, ORBIT_COUNT};
pub use io::{read_orbit_csv, write_orbit_csv};

use ndarray::Array2;

/// Per-node orbit counts, `N x 73`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMatrix {
    pub counts: Array2<u64>,
}

impl OrbitMatrix {
    pub fn zeros(node_count: usize) -> Self {
        OrbitMatrix {
            counts: Array2::zeros((node_count, ORBIT_COUNT)),
        }
    }

    pub fn node_count(&self) -> usize {
        self.counts.nrows()
    }

    pub fn get(&self, node: usize, orbit: usize) -> u64 {
        self.counts[[node, orbit]]
    }

    pub fn column_sum(&self, orbit: usize) -> u64 {
        self.counts.column(orbit).sum()
    }

    /// Rows reordered so that row `perm[v]` of the result is row `v` here.
    pub fn permute_rows(&self, perm: &[usize]) -> OrbitMatrix {
        let mut out = OrbitMatrix::zeros(self.node_count());
        for (v, &p) in perm.iter().enumerate() {
            out.counts.row_mut(p).assign(&self.counts.row(v));
        }
        out
    }
}

/// `log(1 + count)` orbit features, the working representation for
/// silhouettes and surrogate models.
#[derive(Debug, Clone, PartialEq)]
pub struct LogOrbitMatrix {
    pub values: Array2<f64>,
}

impl LogOrbitMatrix {
    pub fn node_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn feature_count(&self) -> usize {
        self.values.ncols()
    }

    /// Keeps only `rows`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> LogOrbitMatrix {
        LogOrbitMatrix {
            values: self.values.select(ndarray::Axis(0), rows),
        }
    }
}

/// Elementwise `ln(1 + x)`; zero counts map to exactly zero.
pub fn log_transform(counts: &OrbitMatrix) -> LogOrbitMatrix {
    LogOrbitMatrix {
        values: counts.counts.mapv(|c| (c as f64).ln_1p()),
    }
}
