//! Differential-testing oracle: grows every connected vertex set by plain
//! breadth-wise expansion with sort-and-dedup of packed sets, then classifies each
//! set by searching for an explicit isomorphism onto a graphlet template.

use super::graphlets::{Graphlet, GRAPHLETS};
use super::OrbitMatrix;
use crate::graph::Graph;
use crate::{Error, Result};

pub const DEFAULT_BRUTEFORCE_LIMIT: usize = 300;

/// Bits per node index in a packed vertex set.
const INDEX_BITS: u32 = 12;

pub fn count_orbits_bruteforce(graph: &Graph, max_nodes: usize) -> Result<OrbitMatrix> {
    let n = graph.node_count();
    if n > max_nodes || n >= 1 << INDEX_BITS {
        return Err(Error::GraphTooLarge {
            nodes: n,
            limit: max_nodes.min((1 << INDEX_BITS) - 1),
        });
    }
    let mut out = OrbitMatrix::zeros(n);
    let mut classifier = Classifier::default();
    let mut set = Vec::with_capacity(5);

    for root in 0..n {
        // sets whose smallest node is `root`, each packed as sorted indices
        let mut level: Vec<u64> = vec![pack(&[root])];
        for _size in 2..=5 {
            let mut next: Vec<u64> = Vec::with_capacity(level.len() * 4);
            for &key in &level {
                unpack(key, &mut set);
                for &m in &set {
                    for &w in graph.neighbors(m) {
                        if w > root && !set.contains(&w) {
                            next.push(pack_with(&set, w));
                        }
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            for &key in &next {
                unpack(key, &mut set);
                let orbits = classifier.orbits_of(graph, &set);
                for (&v, &o) in set.iter().zip(orbits.iter()) {
                    out.counts[[v, o as usize]] += 1;
                }
            }
            level = next;
        }
    }
    Ok(out)
}

/// Sorted indices in 12-bit fields from the bottom, length in the top bits.
fn pack(set: &[usize]) -> u64 {
    let fields = set.iter().enumerate().fold(0u64, |acc, (i, &v)| {
        acc | (v as u64) << (INDEX_BITS * i as u32)
    });
    fields | (set.len() as u64) << (INDEX_BITS * 5)
}

/// Packs `set` plus `extra`, keeping the indices sorted.
fn pack_with(set: &[usize], extra: usize) -> u64 {
    let mut grown = [0usize; 5];
    let at = set.partition_point(|&v| v < extra);
    grown[..at].copy_from_slice(&set[..at]);
    grown[at] = extra;
    grown[at + 1..=set.len()].copy_from_slice(&set[at..]);
    pack(&grown[..=set.len()])
}

fn unpack(key: u64, set: &mut Vec<usize>) {
    set.clear();
    let len = (key >> (INDEX_BITS * 5)) as u32;
    let mask = (1u64 << INDEX_BITS) - 1;
    set.extend((0..len).map(|i| ((key >> (INDEX_BITS * i)) & mask) as usize));
}

/// Orbits per position, memoised by (set size, adjacency bits over position
/// pairs). Entries are filled by isomorphism search on first sight.
struct Classifier {
    memo: Vec<Option<Vec<u8>>>,
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier {
            memo: vec![None; 6 << 10],
        }
    }
}

impl Classifier {
    fn orbits_of(&mut self, graph: &Graph, set: &[usize]) -> &[u8] {
        let mut bits = 0usize;
        let mut bit = 0;
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                if graph.has_edge(set[i], set[j]) {
                    bits |= 1 << bit;
                }
                bit += 1;
            }
        }
        self.memo[(set.len() << 10) | bits].get_or_insert_with(|| {
            let adj: Vec<Vec<bool>> = (0..set.len())
                .map(|a| {
                    (0..set.len())
                        .map(|b| a != b && graph.has_edge(set[a], set[b]))
                        .collect()
                })
                .collect();
            classify(&adj).expect("every connected set of 2-5 nodes matches a graphlet")
        })
    }
}

fn classify(adj: &[Vec<bool>]) -> Option<Vec<u8>> {
    let s = adj.len();
    let edges = adj.iter().flatten().filter(|&&b| b).count() / 2;
    GRAPHLETS
        .iter()
        .filter(|g| g.node_count() == s && g.edges.len() == edges)
        .find_map(|g| {
            let mut mapping = vec![usize::MAX; s];
            let mut used = vec![false; s];
            if find_isomorphism(adj, &template_adjacency(g), 0, &mut mapping, &mut used) {
                Some(mapping.iter().map(|&p| g.orbits[p]).collect())
            } else {
                None
            }
        })
}

fn template_adjacency(g: &Graphlet) -> Vec<Vec<bool>> {
    let s = g.node_count();
    let mut adj = vec![vec![false; s]; s];
    for &(a, b) in g.edges {
        adj[a as usize][b as usize] = true;
        adj[b as usize][a as usize] = true;
    }
    adj
}

/// Backtracking search for a map `set position -> template position` that
/// preserves adjacency and non-adjacency.
fn find_isomorphism(
    adj: &[Vec<bool>],
    tmpl: &[Vec<bool>],
    pos: usize,
    mapping: &mut [usize],
    used: &mut [bool],
) -> bool {
    let s = adj.len();
    if pos == s {
        return true;
    }
    for cand in 0..s {
        if used[cand] {
            continue;
        }
        let consistent = (0..pos).all(|prev| adj[pos][prev] == tmpl[cand][mapping[prev]]);
        if !consistent {
            continue;
        }
        mapping[pos] = cand;
        used[cand] = true;
        if find_isomorphism(adj, tmpl, pos + 1, mapping, used) {
            return true;
        }
        used[cand] = false;
    }
    mapping[pos] = usize::MAX;
    false
}
