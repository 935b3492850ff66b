//! The 30 connected graphlets on 2–5 nodes and their 73 automorphism orbits,
//! numbered in the standard Pržulj enumeration (orbit 0 = degree, orbit 72 =
//! member of a 5-clique).

use std::sync::OnceLock;

pub const ORBIT_COUNT: usize = 73;
pub const GRAPHLET_COUNT: usize = 30;

/// A connected graphlet with the orbit of each of its positions.
#[derive(Debug, Clone, Copy)]
pub struct Graphlet {
    pub id: usize,
    pub edges: &'static [(u8, u8)],
    pub orbits: &'static [u8],
}

impl Graphlet {
    pub fn node_count(&self) -> usize {
        self.orbits.len()
    }
}

macro_rules! graphlet {
    ($id:expr, [$(($a:expr, $b:expr)),*], [$($o:expr),*]) => {
        Graphlet { id: $id, edges: &[$(($a, $b)),*], orbits: &[$($o),*] }
    };
}

pub static GRAPHLETS: [Graphlet; GRAPHLET_COUNT] = [
    // 2 nodes
    graphlet!(0, [(0, 1)], [0, 0]),
    // 3 nodes: path, triangle
    graphlet!(1, [(0, 1), (0, 2)], [2, 1, 1]),
    graphlet!(2, [(0, 1), (0, 2), (1, 2)], [3, 3, 3]),
    // 4 nodes
    graphlet!(3, [(0, 1), (0, 3), (1, 2)], [5, 5, 4, 4]),
    graphlet!(4, [(0, 3), (1, 3), (2, 3)], [6, 6, 6, 7]),
    graphlet!(5, [(0, 1), (0, 3), (1, 2), (2, 3)], [8, 8, 8, 8]),
    graphlet!(6, [(0, 3), (1, 2), (1, 3), (2, 3)], [9, 10, 10, 11]),
    graphlet!(
        7,
        [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)],
        [13, 12, 13, 12]
    ),
    graphlet!(
        8,
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        [14, 14, 14, 14]
    ),
    // 5 nodes
    graphlet!(9, [(0, 1), (0, 4), (1, 2), (2, 3)], [16, 17, 16, 15, 15]),
    graphlet!(10, [(0, 4), (1, 3), (2, 3), (3, 4)], [18, 19, 19, 21, 20]),
    graphlet!(11, [(0, 4), (1, 4), (2, 4), (3, 4)], [22, 22, 22, 22, 23]),
    graphlet!(
        12,
        [(0, 1), (0, 2), (0, 4), (1, 2), (2, 3)],
        [26, 25, 26, 24, 24]
    ),
    graphlet!(
        13,
        [(0, 4), (1, 2), (1, 3), (2, 3), (3, 4)],
        [27, 29, 29, 30, 28]
    ),
    graphlet!(
        14,
        [(0, 4), (1, 4), (2, 3), (2, 4), (3, 4)],
        [31, 31, 32, 32, 33]
    ),
    graphlet!(
        15,
        [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)],
        [34, 34, 34, 34, 34]
    ),
    graphlet!(
        16,
        [(0, 1), (1, 3), (1, 4), (2, 3), (2, 4)],
        [35, 38, 36, 37, 37]
    ),
    graphlet!(
        17,
        [(0, 1), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4)],
        [39, 42, 41, 40, 40]
    ),
    graphlet!(
        18,
        [(0, 1), (0, 4), (1, 4), (2, 3), (2, 4), (3, 4)],
        [43, 43, 43, 43, 44]
    ),
    graphlet!(
        19,
        [(0, 1), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        [45, 47, 46, 48, 48]
    ),
    graphlet!(
        20,
        [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)],
        [50, 50, 49, 49, 49]
    ),
    graphlet!(
        21,
        [(0, 1), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4)],
        [53, 51, 51, 53, 52]
    ),
    graphlet!(
        22,
        [(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        [54, 54, 54, 55, 55]
    ),
    graphlet!(
        23,
        [(0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        [56, 57, 57, 57, 58]
    ),
    graphlet!(
        24,
        [(0, 1), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4)],
        [59, 61, 59, 60, 60]
    ),
    graphlet!(
        25,
        [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 4)],
        [63, 63, 64, 62, 64]
    ),
    graphlet!(
        26,
        [
            (0, 1),
            (0, 3),
            (0, 4),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4)
        ],
        [66, 66, 65, 67, 67]
    ),
    graphlet!(
        27,
        [
            (0, 1),
            (0, 3),
            (0, 4),
            (1, 2),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4)
        ],
        [68, 68, 68, 68, 69]
    ),
    graphlet!(
        28,
        [
            (0, 1),
            (0, 3),
            (0, 4),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4)
        ],
        [70, 71, 70, 71, 71]
    ),
    graphlet!(
        29,
        [
            (0, 1),
            (0, 2),
            (0, 3),
            (0, 4),
            (1, 2),
            (1, 3),
            (1, 4),
            (2, 3),
            (2, 4),
            (3, 4)
        ],
        [72, 72, 72, 72, 72]
    ),
];

/// Bit index of the pair `(i, j)`, `i < j`, in a position-pair mask. Pairs
/// are ordered so that adding position `j` touches bits `j(j-1)/2 .. j(j+1)/2`.
#[inline]
pub const fn pair_bit(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

pub(crate) const NOT_CONNECTED: u8 = u8::MAX;

/// Position-to-orbit lookup for every labelled graph on `s` nodes, keyed by
/// its pair mask; `tables[s][mask][i]` is the orbit of position `i`.
pub(crate) struct OrbitTables {
    tables: [Vec<[u8; 5]>; 6],
}

impl OrbitTables {
    pub(crate) fn get() -> &'static OrbitTables {
        static TABLES: OnceLock<OrbitTables> = OnceLock::new();
        TABLES.get_or_init(OrbitTables::build)
    }

    fn build() -> OrbitTables {
        let mut tables: [Vec<[u8; 5]>; 6] = Default::default();
        for (s, table) in tables.iter_mut().enumerate().skip(2) {
            *table = vec![[NOT_CONNECTED; 5]; 1 << (s * (s - 1) / 2)];
        }
        for g in GRAPHLETS.iter() {
            let s = g.node_count();
            for perm in permutations(s) {
                let mut mask = 0usize;
                for &(a, b) in g.edges {
                    let (x, y) = (perm[a as usize], perm[b as usize]);
                    mask |= 1 << pair_bit(x.min(y), x.max(y));
                }
                let entry = &mut tables[s][mask];
                for (pos, &orbit) in g.orbits.iter().enumerate() {
                    entry[perm[pos]] = orbit;
                }
            }
        }
        OrbitTables { tables }
    }

    #[inline]
    pub(crate) fn lookup(&self, size: usize, mask: usize) -> &[u8; 5] {
        &self.tables[size][mask]
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}
