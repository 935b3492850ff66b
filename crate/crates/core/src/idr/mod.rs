//! Rao-Stirling interdisciplinarity of node neighbourhoods and its
//! degree-binned comparison across roles.

mod binned;
mod distance;
mod diversity;

pub use binned::{
    binned_idr_report, write_binned_csv, write_binned_values_csv, BinnedIdrTable, BinnedRow,
    DEFAULT_BINS, DEFAULT_MIN_PER_ROLE,
};
pub use distance::{discipline_distance, DisciplineDistanceMatrix, DistanceMode};
pub use diversity::{
    diversity_report, rao_stirling, rao_stirling_from_proportions, write_diversity_csv, Direction,
    DiversityReport, DiversityRow, DiversityScore, RaoStirlingConfig,
};
