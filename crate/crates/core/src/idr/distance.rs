use ndarray::Array2;

use crate::graph::{Graph, NodeTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMode {
    /// Every pair of distinct disciplines at distance 1.
    #[default]
    Uniform,
    /// `1 - cosine` of per-discipline edge-endpoint profiles.
    CocitationCosine,
}

/// Symmetric distances in [0, 1] with a zero diagonal, indexed like
/// `disciplines` (sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct DisciplineDistanceMatrix {
    pub disciplines: Vec<String>,
    pub d: Array2<f64>,
}

impl DisciplineDistanceMatrix {
    pub fn index_of(&self, discipline: &str) -> Option<usize> {
        self.disciplines
            .binary_search_by(|d| d.as_str().cmp(discipline))
            .ok()
    }

    pub fn len(&self) -> usize {
        self.disciplines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disciplines.is_empty()
    }
}

/// Distances between the disciplines present in `table`.
///
/// In co-citation mode the profile of discipline `i` counts, over every edge
/// with a labelled endpoint in `i`, the discipline of the other endpoint.
/// A discipline with an all-zero profile is at distance 1 from the others.
pub fn discipline_distance(
    table: &NodeTable,
    graph: &Graph,
    mode: DistanceMode,
) -> Result<DisciplineDistanceMatrix> {
    let disciplines = table.distinct_categories();
    let k = disciplines.len();
    if k < 2 {
        return Err(Error::TooFewDisciplines(k));
    }
    if table.len() != graph.node_count() {
        return Err(Error::Dimension(format!(
            "node table has {} rows, graph has {} nodes",
            table.len(),
            graph.node_count()
        )));
    }
    let mut d = Array2::<f64>::ones((k, k));
    match mode {
        DistanceMode::Uniform => {}
        DistanceMode::CocitationCosine => {
            let label: Vec<Option<usize>> = (0..graph.node_count())
                .map(|v| {
                    table
                        .category(v)
                        .map(|c| disciplines.binary_search_by(|d| d.as_str().cmp(c)).unwrap())
                })
                .collect();
            let mut profile = Array2::<f64>::zeros((k, k));
            for (u, v) in graph.edges() {
                if let (Some(a), Some(b)) = (label[u], label[v]) {
                    profile[[a, b]] += 1.0;
                    profile[[b, a]] += 1.0;
                }
            }
            for i in 0..k {
                for j in 0..k {
                    let (x, y) = (profile.row(i), profile.row(j));
                    let norm = x.dot(&x).sqrt() * y.dot(&y).sqrt();
                    if norm > 0.0 {
                        d[[i, j]] = (1.0 - x.dot(&y) / norm).clamp(0.0, 1.0);
                    }
                }
            }
            for i in 0..k {
                for j in 0..i {
                    let m = 0.5 * (d[[i, j]] + d[[j, i]]);
                    d[[i, j]] = m;
                    d[[j, i]] = m;
                }
            }
        }
    }
    for i in 0..k {
        d[[i, i]] = 0.0;
    }
    Ok(DisciplineDistanceMatrix { disciplines, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(labels: &[&str]) -> NodeTable {
        let mut t = NodeTable::new();
        for (i, l) in labels.iter().enumerate() {
            t.push(i.to_string(), Some(l.to_string())).unwrap();
        }
        t
    }

    #[test]
    fn uniform_is_one_off_the_diagonal() {
        let t = labelled(&["x", "y", "z"]);
        let m = discipline_distance(&t, &Graph::from_edge_slice(3, &[]), DistanceMode::Uniform)
            .unwrap();
        assert_eq!(
            m.d,
            ndarray::array![[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn one_discipline_is_rejected() {
        let t = labelled(&["x", "x"]);
        let g = Graph::from_edge_slice(2, &[(0, 1)]);
        assert!(matches!(
            discipline_distance(&t, &g, DistanceMode::Uniform),
            Err(Error::TooFewDisciplines(1))
        ));
    }

    #[test]
    fn star_corpus_cosines() {
        // A - B - C: profiles A = (0,1,0), B = (1,0,1), C = (0,1,0).
        let t = labelled(&["A", "B", "C"]);
        let g = Graph::from_edge_slice(3, &[(0, 1), (1, 2)]);
        let m = discipline_distance(&t, &g, DistanceMode::CocitationCosine).unwrap();
        assert_eq!(m.d[[0, 2]], 0.0);
        assert_eq!(m.d[[0, 1]], 1.0);
        assert_eq!(m.d[[1, 2]], 1.0);
    }

    #[test]
    fn partial_overlap_cosine() {
        // Edges A-B, A-C, B-C, C-C': A = (0,1,1), B = (1,0,1), C = (1,1,2).
        let t = labelled(&["A", "B", "C", "C"]);
        let g = Graph::from_edge_slice(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]);
        let m = discipline_distance(&t, &g, DistanceMode::CocitationCosine).unwrap();
        let cos_ab = 1.0 / 2.0;
        let cos_ac = 3.0 / (2f64.sqrt() * 6f64.sqrt());
        assert!((m.d[[0, 1]] - (1.0 - cos_ab)).abs() < 1e-12);
        assert!((m.d[[0, 2]] - (1.0 - cos_ac)).abs() < 1e-12);
        assert_eq!(m.d, m.d.t());
    }
}
