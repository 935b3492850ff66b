//! Structural role discovery on large graphs, explained in the vocabulary of
//! graphlet orbits.
//!
//! The crate is organised around the workflow:
//!
//! - [`graph`]: immutable undirected graphs, edge-list and node-table ingestion,
//!   planted-role generators.
//! - [`census`]: per-node orbit counts on connected graphlets of 2–5 nodes.
//! - [`embed`]: GraphWave and RolX role embeddings, plus CSV import.
//! - [`cluster`]: k-means role sets and silhouette validation in orbit space.
//! - [`explain`]: random-forest surrogates, permutation importance, ALE/PDP.
//! - [`idr`]: Rao-Stirling diversity and degree-binned comparisons per role.

pub mod census;
pub mod cluster;
pub mod embed;
mod error;
pub mod explain;
pub mod graph;
pub mod idr;
pub mod seeds;

pub use error::{Error, Result};
