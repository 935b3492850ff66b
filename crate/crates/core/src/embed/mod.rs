//! Structural role embeddings.
//!
//! GraphWave and RolX are computed natively; any other method enters through
//! [`import_embedding`] as a CSV of precomputed vectors.

mod graphwave;
mod io;
mod nmf;
mod refex;
mod rolx;

pub use graphwave::{graphwave_embed, GraphWaveConfig};
pub use io::{import_embedding, write_embedding_csv};
pub use nmf::{nmf, NmfConfig, NmfResult};
pub use refex::{refex_features, RefexConfig, RefexFeatureMatrix};
pub use rolx::{rolx_embed, RolxConfig, RolxEmbedding};

use ndarray::Array2;

use crate::{Error, Result};

/// Node embedding, one row per node in graph order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub vectors: Array2<f64>,
    pub method_tag: String,
}

impl EmbeddingMatrix {
    /// Rejects non-finite entries.
    pub fn new(vectors: Array2<f64>, method_tag: impl Into<String>) -> Result<Self> {
        if let Some(((r, c), x)) = vectors.indexed_iter().find(|(_, x)| !x.is_finite()) {
            return Err(Error::Degenerate(format!(
                "embedding entry ({r}, {c}) is {x}"
            )));
        }
        Ok(EmbeddingMatrix {
            vectors,
            method_tag: method_tag.into(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}
