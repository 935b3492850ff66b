use std::collections::BTreeSet;
use std::io::Write;

use super::DiversityReport;
use crate::{Error, Result};

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_MIN_PER_ROLE: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedRow {
    pub bin: usize,
    /// Log-degree range `[lo, hi)`; the last bin also holds `hi`.
    pub lo: f64,
    pub hi: f64,
    pub role: usize,
    pub idr_values: Vec<f64>,
    /// True when every role has more than `min_per_role` scores in the bin.
    pub included: bool,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedIdrTable {
    /// `bins + 1` strictly increasing natural-log degree edges.
    pub edges: Vec<f64>,
    /// One row per (bin, role), bin-major, roles ascending.
    pub rows: Vec<BinnedRow>,
    pub roles: Vec<usize>,
    /// Nodes left out because their degree is 0.
    pub zero_degree: usize,
    pub min_per_role: usize,
}

impl BinnedIdrTable {
    pub fn included_bins(&self) -> Vec<usize> {
        let mut bins: Vec<usize> = self
            .rows
            .iter()
            .filter(|r| r.included)
            .map(|r| r.bin)
            .collect();
        bins.dedup();
        bins
    }

    pub fn cell(&self, bin: usize, role: usize) -> Option<&BinnedRow> {
        self.rows.iter().find(|r| r.bin == bin && r.role == role)
    }
}

/// Groups scored nodes into `bins` equal-width bins of `ln(degree)` and
/// summarises the IDR values of each role per bin.
pub fn binned_idr_report(
    report: &DiversityReport,
    bins: usize,
    min_per_role: usize,
) -> Result<BinnedIdrTable> {
    if bins == 0 {
        return Err(Error::InvalidParameter("need at least one bin".into()));
    }
    let zero_degree = report.rows.iter().filter(|r| r.degree == 0).count();
    let logs: Vec<f64> = report
        .rows
        .iter()
        .filter(|r| r.degree > 0)
        .map(|r| (r.degree as f64).ln())
        .collect();
    if logs.is_empty() {
        return Err(Error::Degenerate(
            "every node has degree 0; nothing to bin".into(),
        ));
    }
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let width = span / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + k as f64 * width).collect();
    edges.push(lo + span);

    let roles: Vec<usize> = report
        .rows
        .iter()
        .map(|r| r.role)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut values = vec![vec![Vec::new(); roles.len()]; bins];
    for r in report.rows.iter().filter(|r| r.degree > 0) {
        let Some(idr) = r.idr else { continue };
        let x = (r.degree as f64).ln();
        let bin = (((x - lo) / width) as usize).min(bins - 1);
        let role = roles.binary_search(&r.role).expect("role collected above");
        values[bin][role].push(idr);
    }

    let mut rows = Vec::with_capacity(bins * roles.len());
    for (bin, cells) in values.into_iter().enumerate() {
        let included = cells.iter().all(|v| v.len() > min_per_role);
        for (role_idx, mut v) in cells.into_iter().enumerate() {
            v.sort_by(f64::total_cmp);
            rows.push(BinnedRow {
                bin,
                lo: edges[bin],
                hi: edges[bin + 1],
                role: roles[role_idx],
                included,
                median: quantile(&v, 0.5),
                q1: quantile(&v, 0.25),
                q3: quantile(&v, 0.75),
                idr_values: v,
            });
        }
    }
    Ok(BinnedIdrTable {
        edges,
        rows,
        roles,
        zero_degree,
        min_per_role,
    })
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let below = pos.floor() as usize;
    let above = pos.ceil() as usize;
    Some(sorted[below] + (pos - below as f64) * (sorted[above] - sorted[below]))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV `bin,lo,hi,role,count,included,median,q1,q3`.
pub fn write_binned_csv<W: Write>(table: &BinnedIdrTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "bin", "lo", "hi", "role", "count", "included", "median", "q1", "q3",
    ])?;
    for r in &table.rows {
        w.write_record([
            r.bin.to_string(),
            r.lo.to_string(),
            r.hi.to_string(),
            r.role.to_string(),
            r.idr_values.len().to_string(),
            r.included.to_string(),
            opt(r.median),
            opt(r.q1),
            opt(r.q3),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<binned csv>", e))?;
    Ok(())
}

/// Long format `bin,role,idr`, one row per score, for box plots.
pub fn write_binned_values_csv<W: Write>(table: &BinnedIdrTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin", "role", "idr"])?;
    for r in &table.rows {
        for v in &r.idr_values {
            w.write_record([r.bin.to_string(), r.role.to_string(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io("<binned values csv>", e))?;
    Ok(())
}
