//! Surrogate explanations of role assignments: a random forest from log
//! orbit vectors to roles, permutation importance, and ALE/PDP curves.

mod effects;
mod forest;
mod importance;
mod surrogate;

pub use effects::{
    effect_curve, orbit3_threshold, write_effect_csv, EffectCurve, EffectKind, DEFAULT_BINS,
};
pub use forest::{ForestConfig, RandomForest, Tree};
pub use importance::{
    format_entry, permutation_importance, write_importance_csv, ImportanceReport, ImportanceRow,
};
pub use surrogate::{
    refit_on_subpopulation, train_surrogate, SubpopulationModel, SurrogateConfig, SurrogateForest,
};
