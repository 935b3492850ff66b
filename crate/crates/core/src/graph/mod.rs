//! Immutable undirected simple graphs and their node tables.

mod io;
mod planted;

use std::collections::{BTreeMap, HashMap};

pub use io::{load_edge_list, load_node_table, write_edge_list, IdPolicy, LoadedGraph};
pub use planted::{generate_planted_graph, PlantedGraph, Template};

use crate::{Error, Result};

/// Undirected simple graph in compressed sparse row form.
///
/// Neighbour lists are sorted ascending, contain no self-loops and no
/// duplicates, and adjacency is symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_count: usize,
}

/// Bookkeeping from [`Graph::from_edges`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a graph on `node_count` nodes, dropping self-loops and
    /// collapsing duplicate (or reversed) edges.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<(Graph, BuildStats)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut stats = BuildStats::default();
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            pairs.push((u.min(v), u.max(v)));
        }
        let before = pairs.len();
        pairs.sort_unstable();
        pairs.dedup();
        stats.duplicates = before - pairs.len();

        let mut degree = vec![0usize; node_count];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = vec![0usize; 2 * pairs.len()];
        for &(u, v) in &pairs {
            neighbors[fill[u]] = v;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..node_count {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let graph = Graph {
            offsets,
            neighbors,
            edge_count: pairs.len(),
        };
        Ok((graph, stats))
    }

    /// Convenience constructor for tests and generators; panics on out-of-range ids.
    pub fn from_edge_slice(node_count: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(node_count, edges.iter().copied())
            .expect("edge endpoints in range")
            .0
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Connected components, each a sorted node list; components are ordered
    /// by their smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::Dimension(format!(
                "permutation has {} entries for {} nodes",
                perm.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
        }
        Ok(Graph::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))?.0)
    }

    /// Induced subgraph on `nodes` (sorted), relabelled to `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let local: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = nodes.iter().enumerate().flat_map(|(i, &v)| {
            let local = &local;
            self.neighbors(v)
                .iter()
                .filter_map(move |w| local.get(w).copied())
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        });
        Graph::from_edges(nodes.len(), edges.collect::<Vec<_>>())
            .expect("local ids in range")
            .0
    }
}

/// Directed citation arcs kept alongside the undirected [`Graph`].
///
/// `cites[v]` lists the nodes `v` cites; `cited_by[v]` the nodes citing `v`.
/// Only edges whose direction was known at load time appear here.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Arcs {
    pub cites: Vec<Vec<usize>>,
    pub cited_by: Vec<Vec<usize>>,
}

impl Arcs {
    pub fn from_pairs(node_count: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Arcs {
        let mut cites = vec![Vec::new(); node_count];
        let mut cited_by = vec![Vec::new(); node_count];
        for (src, dst) in arcs {
            if src == dst {
                continue;
            }
            cites[src].push(dst);
            cited_by[dst].push(src);
        }
        for list in cites.iter_mut().chain(cited_by.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Arcs { cites, cited_by }
    }

    pub fn is_empty(&self) -> bool {
        self.cites.iter().all(Vec::is_empty)
    }
}

/// External ids and optional discipline labels, index-aligned with a [`Graph`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeTable {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    categories: Vec<Option<String>>,
    extra: Vec<BTreeMap<String, String>>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table of `0..n` rendered as ids, no categories.
    pub fn sequential(n: usize) -> Self {
        let mut table = Self::new();
        for i in 0..n {
            table
                .push(i.to_string(), None)
                .expect("sequential ids are unique");
        }
        table
    }

    pub fn push(&mut self, id: impl Into<String>, category: Option<String>) -> Result<usize> {
        self.push_with_extra(id, category, BTreeMap::new())
    }

    pub fn push_with_extra(
        &mut self,
        id: impl Into<String>,
        category: Option<String>,
        extra: BTreeMap<String, String>,
    ) -> Result<usize> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        let idx = self.ids.len();
        self.index.insert(id.clone(), idx);
        self.ids.push(id);
        self.categories.push(category.filter(|c| !c.is_empty()));
        self.extra.push(extra);
        Ok(idx)
    }

    /// Index of `id`, inserting it (without category) when absent.
    pub(crate) fn get_or_insert(&mut self, id: &str) -> usize {
        match self.index.get(id) {
            Some(&i) => i,
            None => self.push(id, None).expect("id checked absent"),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn category(&self, v: usize) -> Option<&str> {
        self.categories[v].as_deref()
    }

    pub fn set_category(&mut self, v: usize, category: Option<String>) {
        self.categories[v] = category.filter(|c| !c.is_empty());
    }

    pub fn extra(&self, v: usize) -> &BTreeMap<String, String> {
        &self.extra[v]
    }

    /// Distinct categories in ascending order.
    pub fn distinct_categories(&self) -> Vec<String> {
        let mut cats: Vec<String> = self.categories.iter().flatten().cloned().collect();
        cats.sort();
        cats.dedup();
        cats
    }

    /// Reorders `values` given in `ids` order into this table's node order.
    pub fn align<T: Clone>(&self, ids: &[String], values: &[T]) -> Result<Vec<T>> {
        if ids.len() != values.len() {
            return Err(Error::Dimension(format!(
                "{} ids for {} values",
                ids.len(),
                values.len()
            )));
        }
        let mut slots: Vec<Option<T>> = vec![None; self.len()];
        for (id, value) in ids.iter().zip(values) {
            if let Some(i) = self.index_of(id) {
                slots[i] = Some(value.clone());
            }
        }
        slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::MissingNode(self.ids[i].clone())))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let (g, stats) = Graph::from_edges(3, [(0, 1), (1, 2), (1, 0), (2, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(stats.self_loops, 1);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let g = Graph::from_edge_slice(5, &[(0, 1), (0, 2), (0, 3), (3, 4), (2, 3)]);
        let total: usize = (0..5).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn components_keep_isolated_nodes() {
        let g = Graph::from_edge_slice(5, &[(0, 1), (3, 4)]);
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert_eq!(g.degree(2), 0);
    }

    #[test]
    fn permute_relabels_adjacency() {
        let g = Graph::from_edge_slice(3, &[(0, 1), (1, 2)]);
        let p = g.permute(&[2, 0, 1]).unwrap();
        assert!(p.has_edge(2, 0) && p.has_edge(0, 1) && !p.has_edge(2, 1));
        assert!(g.permute(&[0, 0, 1]).is_err());
    }

    #[test]
    fn empty_categories_are_absent() {
        let mut t = NodeTable::new();
        t.push("a", Some(String::new())).unwrap();
        assert_eq!(t.category(0), None);
        assert!(matches!(t.push("a", None), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn align_reports_missing_id() {
        let t = NodeTable::sequential(3);
        let ids = vec!["2".to_string(), "0".to_string()];
        match t.align(&ids, &[1, 2]) {
            Err(Error::MissingNode(id)) => assert_eq!(id, "1"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
