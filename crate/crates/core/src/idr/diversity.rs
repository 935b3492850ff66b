use std::io::Write;

use ndarray::Array2;
use rayon::prelude::*;

use super::DisciplineDistanceMatrix;
use crate::graph::{Arcs, Graph, NodeTable};
use crate::{Error, Result};

/// Which neighbours count towards a node's discipline mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Nodes citing this node.
    #[default]
    Citing,
    /// Nodes this node cites.
    Cited,
    /// All neighbours in the undirected graph.
    All,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Citing => "citing",
            Direction::Cited => "cited",
            Direction::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RaoStirlingConfig {
    pub direction: Direction,
    /// Count each unordered discipline pair once instead of twice.
    pub halve: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityScore {
    pub idr: f64,
    pub neighbors_used: usize,
}

/// `sum over i != j of p_i p_j d_ij`, summing ordered pairs.
pub fn rao_stirling_from_proportions(p: &[f64], d: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            if i != j {
                total += pi * pj * d[[i, j]];
            }
        }
    }
    total
}

fn neighbours<'a>(
    node: usize,
    graph: &'a Graph,
    arcs: Option<&'a Arcs>,
    direction: Direction,
) -> Result<&'a [usize]> {
    match direction {
        Direction::All => Ok(graph.neighbors(node)),
        Direction::Citing | Direction::Cited => {
            let arcs = arcs.filter(|a| !a.is_empty()).ok_or(Error::NoDirection)?;
            let lists = if direction == Direction::Citing {
                &arcs.cited_by
            } else {
                &arcs.cites
            };
            Ok(lists.get(node).map(Vec::as_slice).unwrap_or(&[]))
        }
    }
}

/// Rao-Stirling diversity of `node`'s labelled neighbours; `None` when no
/// neighbour in the chosen direction carries a discipline.
pub fn rao_stirling(
    node: usize,
    graph: &Graph,
    arcs: Option<&Arcs>,
    table: &NodeTable,
    dmat: &DisciplineDistanceMatrix,
    config: &RaoStirlingConfig,
) -> Result<Option<DiversityScore>> {
    if node >= graph.node_count() {
        return Err(Error::InvalidParameter(format!("node {node} out of range")));
    }
    let mut counts = vec![0usize; dmat.len()];
    let mut used = 0;
    for &u in neighbours(node, graph, arcs, config.direction)? {
        if let Some(c) = table.category(u) {
            let i = dmat.index_of(c).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "discipline `{c}` missing from the distance matrix"
                ))
            })?;
            counts[i] += 1;
            used += 1;
        }
    }
    if used == 0 {
        return Ok(None);
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / used as f64).collect();
    let mut idr = rao_stirling_from_proportions(&p, &dmat.d);
    if config.halve {
        idr /= 2.0;
    }
    Ok(Some(DiversityScore {
        idr,
        neighbors_used: used,
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityRow {
    pub node: usize,
    pub idr: Option<f64>,
    pub degree: usize,
    pub role: usize,
    pub neighbors_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub rows: Vec<DiversityRow>,
    pub direction: Direction,
}

/// Scores every node; `roles[v]` is carried through for binning.
pub fn diversity_report(
    graph: &Graph,
    arcs: Option<&Arcs>,
    table: &NodeTable,
    dmat: &DisciplineDistanceMatrix,
    roles: &[usize],
    config: &RaoStirlingConfig,
) -> Result<DiversityReport> {
    let n = graph.node_count();
    if roles.len() != n || table.len() != n {
        return Err(Error::Dimension(format!(
            "{n} nodes, {} roles, {} table rows",
            roles.len(),
            table.len()
        )));
    }
    let rows = (0..n)
        .into_par_iter()
        .map(|v| {
            let score = rao_stirling(v, graph, arcs, table, dmat, config)?;
            Ok(DiversityRow {
                node: v,
                idr: score.map(|s| s.idr),
                degree: graph.degree(v),
                role: roles[v],
                neighbors_used: score.map_or(0, |s| s.neighbors_used),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiversityReport {
        rows,
        direction: config.direction,
    })
}

/// CSV `id,idr,degree,role,neighbors_used,direction`; absent scores are
/// empty cells.
pub fn write_diversity_csv<W: Write>(
    report: &DiversityReport,
    table: &NodeTable,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "idr", "degree", "role", "neighbors_used", "direction"])?;
    for r in &report.rows {
        w.write_record([
            table.id(r.node).to_string(),
            r.idr.map(|x| x.to_string()).unwrap_or_default(),
            r.degree.to_string(),
            r.role.to_string(),
            r.neighbors_used.to_string(),
            report.direction.as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<diversity csv>", e))?;
    Ok(())
}
