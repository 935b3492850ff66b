//! Candidate role sets from k-means on an embedding, validated by silhouette
//! score in log orbit space.

mod kmeans;
mod nmi;
mod silhouette;
mod sweep;

pub use kmeans::{kmeans, kmeans_points, KmeansConfig, RoleAssignment};
pub use nmi::normalized_mutual_information;
pub use silhouette::{silhouette, silhouette_in_orbit_space, Silhouette, DEFAULT_SAMPLE_CAP};
pub use sweep::{cell_seed, sweep, write_sweep_csv, SilhouetteSweep, SweepConfig, SweepRow};
