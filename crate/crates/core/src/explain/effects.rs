use std::io::Write;

use rayon::prelude::*;

use super::SurrogateForest;
use crate::census::{LogOrbitMatrix, OrbitMatrix};
use crate::{Error, Result};

pub const DEFAULT_BINS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EffectKind {
    Ale,
    Pdp,
}

impl EffectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EffectKind::Ale => "ALE",
            EffectKind::Pdp => "PDP",
        }
    }
}

/// Effect of one orbit on the predicted probability of one role.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectCurve {
    pub orbit: usize,
    /// Role id, as in the labels the model was trained on.
    pub class: usize,
    pub kind: EffectKind,
    /// Strictly ascending quantile edges of the orbit's log counts.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Instances assigned to each grid point: those equal to the first edge
    /// for point 0, those in `(grid[k-1], grid[k]]` for point `k`.
    pub populations: Vec<usize>,
}

/// ALE or PDP curve for `orbit` and role `class` over the rows of `features`.
///
/// ALE: instances in `(z[k-1], z[k]]` (the first bin also takes values equal
/// to `z[0]`) contribute the probability change between setting the orbit to
/// `z[k]` and to `z[k-1]`; bin means are accumulated and centred so that the
/// population-weighted mean over grid points is 0. PDP: mean probability
/// with the orbit clamped to each grid value.
pub fn effect_curve(
    model: &SurrogateForest,
    features: &LogOrbitMatrix,
    orbit: usize,
    class: usize,
    bins: usize,
    kind: EffectKind,
) -> Result<EffectCurve> {
    if bins < 2 {
        return Err(Error::InvalidParameter(
            "effect curves need at least 2 bins".into(),
        ));
    }
    let column = model.column_of(orbit)?;
    let c = model.class_index(class)?;
    let x = model.select(features)?;
    let n = x.nrows();
    if n == 0 {
        return Err(Error::InvalidParameter("no rows to evaluate".into()));
    }
    let mut sorted: Vec<f64> = x.column(column).to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = (0..=bins).map(|k| sorted[k * (n - 1) / bins]).collect();
    grid.dedup();
    if grid.len() < 2 {
        return Err(Error::ConstantFeature(orbit));
    }

    let point: Vec<usize> = x
        .column(column)
        .iter()
        .map(|&v| grid.partition_point(|&z| z < v))
        .collect();
    let mut populations = vec![0usize; grid.len()];
    for &k in &point {
        populations[k] += 1;
    }

    let probability = |i: usize, value: f64| -> f64 {
        let mut row = x.row(i).to_owned();
        row[column] = value;
        model.forest.predict_proba_row(row.view())[c]
    };

    let values = match kind {
        EffectKind::Ale => {
            let local: Vec<(usize, f64)> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let k = point[i].max(1);
                    (k, probability(i, grid[k]) - probability(i, grid[k - 1]))
                })
                .collect();
            let mut sums = vec![0.0; grid.len()];
            let mut counts = vec![0usize; grid.len()];
            for (k, d) in local {
                sums[k] += d;
                counts[k] += 1;
            }
            let mut acc = vec![0.0; grid.len()];
            for k in 1..grid.len() {
                let step = if counts[k] > 0 {
                    sums[k] / counts[k] as f64
                } else {
                    0.0
                };
                acc[k] = acc[k - 1] + step;
            }
            let mean = acc
                .iter()
                .zip(&populations)
                .map(|(a, &p)| a * p as f64)
                .sum::<f64>()
                / n as f64;
            acc.into_iter().map(|a| a - mean).collect()
        }
        EffectKind::Pdp => grid
            .par_iter()
            .map(|&z| (0..n).map(|i| probability(i, z)).sum::<f64>() / n as f64)
            .collect(),
    };
    Ok(EffectCurve {
        orbit,
        class,
        kind,
        grid,
        values,
        populations,
    })
}

/// Largest per-node triangle count, on the `ln(1 + x)` axis of the effect
/// curves.
pub fn orbit3_threshold(counts: &OrbitMatrix) -> f64 {
    let max = counts.counts.column(3).iter().copied().max().unwrap_or(0);
    (max as f64).ln_1p()
}

/// CSV `orbit,class,kind,grid_value,effect`; with `annotation`, one extra row
/// `orbit,,annotation,<threshold>,` per distinct orbit.
pub fn write_effect_csv<W: Write>(
    curves: &[EffectCurve],
    annotation: Option<f64>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["orbit", "class", "kind", "grid_value", "effect"])?;
    for curve in curves {
        for (z, v) in curve.grid.iter().zip(&curve.values) {
            w.write_record([
                curve.orbit.to_string(),
                curve.class.to_string(),
                curve.kind.as_str().to_string(),
                z.to_string(),
                v.to_string(),
            ])?;
        }
    }
    if let Some(threshold) = annotation {
        let mut orbits: Vec<usize> = curves.iter().map(|c| c.orbit).collect();
        orbits.sort_unstable();
        orbits.dedup();
        for orbit in orbits {
            w.write_record([
                orbit.to_string(),
                String::new(),
                "annotation".into(),
                threshold.to_string(),
                String::new(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("<effect csv>", e))?;
    Ok(())
}
