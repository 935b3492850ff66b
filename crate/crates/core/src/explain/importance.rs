use std::io::Write;

use ndarray::Axis;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::SurrogateForest;
use crate::census::LogOrbitMatrix;
use crate::seeds::{derive, Stage};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceRow {
    pub orbit: usize,
    pub mean: f64,
    /// Population standard deviation over repeats.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    /// Sorted by descending mean; ties keep ascending orbit order.
    pub rows: Vec<ImportanceRow>,
    pub baseline_accuracy: f64,
    pub repeats: usize,
    /// Rows the importances were measured on.
    pub evaluated_on: &'static str,
}

impl ImportanceReport {
    /// `"<orbit> (<mean> ±<std>)"` for the top `m` orbits.
    pub fn table_lines(&self, m: usize) -> Vec<String> {
        self.rows.iter().take(m).map(format_entry).collect()
    }
}

pub fn format_entry(row: &ImportanceRow) -> String {
    format!("{} ({:.3} ±{:.4})", row.orbit, row.mean, row.std)
}

/// Drop in holdout accuracy when one orbit column is shuffled, averaged over
/// `repeats` seeded shuffles. `features` and `labels` must be the data the
/// model was trained on.
pub fn permutation_importance(
    model: &SurrogateForest,
    features: &LogOrbitMatrix,
    labels: &[usize],
    repeats: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if labels.len() != features.node_count() {
        return Err(Error::Dimension(format!(
            "{} labels for {} feature rows",
            labels.len(),
            features.node_count()
        )));
    }
    if model.holdout.is_empty() {
        return Err(Error::InvalidParameter(
            "model has no holdout rows to score".into(),
        ));
    }
    if let Some(&bad) = model.holdout.iter().find(|&&i| i >= labels.len()) {
        return Err(Error::Dimension(format!(
            "holdout row {bad} outside the supplied data"
        )));
    }
    let x = model.select(features)?.select(Axis(0), &model.holdout);
    let truth: Vec<usize> = model.holdout.iter().map(|&i| labels[i]).collect();
    let accuracy = |x: ndarray::ArrayView2<f64>| -> f64 {
        let hits = model
            .forest
            .predict(x)
            .into_iter()
            .zip(&truth)
            .filter(|(p, &t)| model.class_labels[*p] == t)
            .count();
        hits as f64 / truth.len() as f64
    };
    let baseline = accuracy(x.view());

    let columns = model.feature_orbits.len();
    let mut rows: Vec<ImportanceRow> = (0..columns)
        .into_par_iter()
        .map(|j| {
            let drops: Vec<f64> = (0..repeats)
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive(
                        seed,
                        Stage::Importance,
                        (j * repeats + r) as u64,
                    ));
                    let mut shuffled = x.clone();
                    let mut column: Vec<f64> = x.column(j).to_vec();
                    column.shuffle(&mut rng);
                    shuffled
                        .column_mut(j)
                        .assign(&ndarray::Array1::from(column));
                    baseline - accuracy(shuffled.view())
                })
                .collect();
            let mean = drops.iter().sum::<f64>() / repeats as f64;
            let var = drops.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / repeats as f64;
            ImportanceRow {
                orbit: model.feature_orbits[j],
                mean,
                std: var.sqrt(),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.mean.total_cmp(&a.mean).then(a.orbit.cmp(&b.orbit)));
    Ok(ImportanceReport {
        rows,
        baseline_accuracy: baseline,
        repeats,
        evaluated_on: "holdout",
    })
}

/// CSV `rank,orbit,mean,std`, rank starting at 1.
pub fn write_importance_csv<W: Write>(report: &ImportanceReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "orbit", "mean", "std"])?;
    for (rank, row) in report.rows.iter().enumerate() {
        w.write_record([
            (rank + 1).to_string(),
            row.orbit.to_string(),
            row.mean.to_string(),
            row.std.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<importance csv>", e))?;
    Ok(())
}
