use std::sync::atomic::{AtomicU64, Ordering};

use ndarray::Array2;
use rayon::prelude::*;

use super::graphlets::{pair_bit, OrbitTables, NOT_CONNECTED, ORBIT_COUNT};
use super::OrbitMatrix;
use crate::graph::Graph;
use crate::{Error, Result};

/// Resource limits for [`count_orbits_with`].
#[derive(Debug, Clone, Copy)]
pub struct CensusConfig {
    /// Upper bound on bytes for the shared count matrix plus per-thread scratch.
    pub memory_budget: u64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            memory_budget: 8 << 30,
        }
    }
}

pub fn count_orbits(graph: &Graph) -> Result<OrbitMatrix> {
    count_orbits_with(graph, &CensusConfig::default())
}

/// Counts orbits by enumerating each connected induced subgraph of 2–5 nodes
/// exactly once, rooted at its smallest node.
///
/// Parallel over roots; counts are accumulated with atomic adds, so the result
/// does not depend on the thread count.
pub fn count_orbits_with(graph: &Graph, config: &CensusConfig) -> Result<OrbitMatrix> {
    let n = graph.node_count();
    let threads = rayon::current_num_threads() as u64;
    let required = (n as u64) * (ORBIT_COUNT as u64) * 8 + threads * (n as u64) * 2;
    if required > config.memory_budget {
        return Err(Error::MemoryBudget {
            required,
            budget: config.memory_budget,
        });
    }

    let shared: Vec<AtomicU64> = (0..n * ORBIT_COUNT).map(|_| AtomicU64::new(0)).collect();
    let tables = OrbitTables::get();
    (0..n).into_par_iter().for_each_init(
        || Walker::new(graph, tables, n),
        |walker, root| walker.run(root, &shared),
    );

    let counts: Vec<u64> = shared.into_iter().map(AtomicU64::into_inner).collect();
    Ok(OrbitMatrix {
        counts: Array2::from_shape_vec((n, ORBIT_COUNT), counts).expect("shape matches"),
    })
}

/// Per-thread enumeration state.
struct Walker<'g> {
    graph: &'g Graph,
    tables: &'static OrbitTables,
    /// `closed[u]` = number of current members equal or adjacent to `u`.
    closed: Vec<u16>,
    members: [usize; 5],
    /// Candidate buffers, one per depth.
    ext: [Vec<usize>; 6],
}

impl<'g> Walker<'g> {
    fn new(graph: &'g Graph, tables: &'static OrbitTables, n: usize) -> Self {
        Walker {
            graph,
            tables,
            closed: vec![0; n],
            members: [0; 5],
            ext: Default::default(),
        }
    }

    fn run(&mut self, root: usize, shared: &[AtomicU64]) {
        self.members[0] = root;
        let mut ext = std::mem::take(&mut self.ext[1]);
        ext.clear();
        self.add(root, root, &mut ext);
        self.extend(root, 1, 0, &ext, shared);
        self.remove(root);
        self.ext[1] = ext;
    }

    /// Marks `w` as a member and collects its exclusive neighbours above `root`.
    fn add(&mut self, root: usize, w: usize, excl: &mut Vec<usize>) {
        self.closed[w] += 1;
        for &u in self.graph.neighbors(w) {
            if self.closed[u] == 0 && u > root {
                excl.push(u);
            }
            self.closed[u] += 1;
        }
    }

    fn remove(&mut self, w: usize) {
        self.closed[w] -= 1;
        for &u in self.graph.neighbors(w) {
            self.closed[u] -= 1;
        }
    }

    fn extend(
        &mut self,
        root: usize,
        size: usize,
        mask: usize,
        ext: &[usize],
        shared: &[AtomicU64],
    ) {
        if size >= 2 {
            let orbits = self.tables.lookup(size, mask);
            debug_assert_ne!(orbits[0], NOT_CONNECTED);
            for (&v, &o) in self.members[..size].iter().zip(orbits) {
                shared[v * ORBIT_COUNT + o as usize].fetch_add(1, Ordering::Relaxed);
            }
        }
        if size == 5 {
            return;
        }
        let mut next = std::mem::take(&mut self.ext[size + 1]);
        for (i, &w) in ext.iter().enumerate() {
            let mut new_mask = mask;
            for (j, &m) in self.members[..size].iter().enumerate() {
                if self.graph.has_edge(m, w) {
                    new_mask |= 1 << pair_bit(j, size);
                }
            }
            next.clear();
            next.extend_from_slice(&ext[i + 1..]);
            if size + 1 < 5 {
                self.add(root, w, &mut next);
            }
            self.members[size] = w;
            self.extend(root, size + 1, new_mask, &next, shared);
            if size + 1 < 5 {
                self.remove(w);
            }
        }
        self.ext[size + 1] = next;
    }
}
