//! Planted-role graphs: disjoint copies of small structural templates whose
//! node positions carry known roles.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::{Error, Result};

/// Built-in structural templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    /// Path on `len` nodes.
    Chain { len: usize },
    /// Hub with `leaves` pendant nodes.
    Star { leaves: usize },
    /// Complete graph on `size` nodes.
    Clique { size: usize },
    /// Two `clique`-cliques whose attachment members are joined through a
    /// path of `bridge` internal nodes.
    Barbell { clique: usize, bridge: usize },
    /// Two stars whose hubs are joined through a path of `bridge` internal nodes.
    StarBarbell { leaves: usize, bridge: usize },
}

impl Template {
    pub fn barbell(clique: usize, bridge: usize) -> Self {
        Template::Barbell { clique, bridge }
    }

    fn name(&self) -> String {
        match *self {
            Template::Chain { len } => format!("chain{len}"),
            Template::Star { leaves } => format!("star{leaves}"),
            Template::Clique { size } => format!("clique{size}"),
            Template::Barbell { clique, bridge } => format!("barbell{clique}-{bridge}"),
            Template::StarBarbell { leaves, bridge } => format!("starbarbell{leaves}-{bridge}"),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Template::Chain { len } => len >= 2,
            Template::Star { leaves } => leaves >= 1,
            Template::Clique { size } => size >= 2,
            Template::Barbell { clique, .. } => clique >= 2,
            Template::StarBarbell { leaves, .. } => leaves >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "degenerate template {self:?}"
            )))
        }
    }

    /// Local edges plus a role name per position.
    fn build(&self) -> (Vec<(usize, usize)>, Vec<String>) {
        let prefix = self.name();
        let mut edges = Vec::new();
        let mut roles = Vec::new();
        match *self {
            Template::Chain { len } => {
                let depth = |i: usize| i.min(len - 1 - i);
                let interior_depths = (len.saturating_sub(1)) / 2;
                for i in 0..len {
                    if i + 1 < len {
                        edges.push((i, i + 1));
                    }
                    roles.push(match depth(i) {
                        0 => "end".to_string(),
                        _ if interior_depths <= 1 => "interior".to_string(),
                        d => format!("interior{d}"),
                    });
                }
            }
            Template::Star { leaves } => {
                roles.push("hub".into());
                for i in 1..=leaves {
                    edges.push((0, i));
                    roles.push("leaf".into());
                }
            }
            Template::Clique { size } => {
                for i in 0..size {
                    for j in i + 1..size {
                        edges.push((i, j));
                    }
                    roles.push("member".into());
                }
            }
            Template::Barbell { clique, bridge } => {
                // clique A: 0..clique (attachment clique-1), bridge, clique B.
                let b_start = clique + bridge;
                for i in 0..clique {
                    for j in i + 1..clique {
                        edges.push((i, j));
                        edges.push((b_start + i, b_start + j));
                    }
                }
                let attach_a = clique - 1;
                let attach_b = b_start;
                let mut prev = attach_a;
                for k in 0..bridge {
                    edges.push((prev, clique + k));
                    prev = clique + k;
                }
                edges.push((prev, attach_b));
                roles.extend(std::iter::repeat_n("member".to_string(), clique - 1));
                roles.push("attachment".into());
                roles.extend(bridge_roles(bridge));
                roles.push("attachment".into());
                roles.extend(std::iter::repeat_n("member".to_string(), clique - 1));
            }
            Template::StarBarbell { leaves, bridge } => {
                // hub A, its leaves, bridge, hub B, its leaves.
                let hub_a = 0;
                let hub_b = 1 + leaves + bridge;
                roles.push("hub".into());
                for i in 1..=leaves {
                    edges.push((hub_a, i));
                    roles.push("leaf".into());
                }
                let mut prev = hub_a;
                for k in 0..bridge {
                    edges.push((prev, 1 + leaves + k));
                    prev = 1 + leaves + k;
                }
                edges.push((prev, hub_b));
                roles.extend(bridge_roles(bridge));
                roles.push("hub".into());
                for i in 1..=leaves {
                    edges.push((hub_b, hub_b + i));
                    roles.push("leaf".into());
                }
            }
        }
        let roles = roles.into_iter().map(|r| format!("{prefix}:{r}")).collect();
        (edges, roles)
    }
}

/// Parses `chain:L`, `star:L`, `clique:S`, `barbell:C:B` or
/// `starbarbell:L:B`.
impl std::str::FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("bad template `{s}`")))
        };
        let template = match (parts[0], parts.len()) {
            ("chain", 2) => Template::Chain { len: num(1)? },
            ("star", 2) => Template::Star { leaves: num(1)? },
            ("clique", 2) => Template::Clique { size: num(1)? },
            ("barbell", 3) => Template::Barbell {
                clique: num(1)?,
                bridge: num(2)?,
            },
            ("starbarbell", 3) => Template::StarBarbell {
                leaves: num(1)?,
                bridge: num(2)?,
            },
            _ => return Err(Error::InvalidParameter(format!("bad template `{s}`"))),
        };
        template.validate()?;
        Ok(template)
    }
}

fn bridge_roles(bridge: usize) -> Vec<String> {
    (1..=bridge)
        .map(|i| {
            let d = i.min(bridge + 1 - i);
            if 2 * d == bridge + 1 {
                "center".to_string()
            } else {
                format!("bridge{d}")
            }
        })
        .collect()
}

/// A generated graph with its ground-truth role per node.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedGraph {
    pub graph: Graph,
    pub true_role: Vec<usize>,
    /// `role_names[r]` describes role `r`, e.g. `barbell5-1:center`.
    pub role_names: Vec<String>,
}

impl PlantedGraph {
    pub fn role_id(&self, name: &str) -> Option<usize> {
        self.role_names.iter().position(|n| n == name)
    }

    pub fn role_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.role_names.len()];
        for &r in &self.true_role {
            counts[r] += 1;
        }
        counts
    }
}

/// Lays out `copies` disjoint copies of every template, then adds
/// `noise_edges` uniformly random non-edges. Deterministic for a fixed seed.
pub fn generate_planted_graph(
    templates: &[Template],
    copies: usize,
    noise_edges: usize,
    seed: u64,
) -> Result<PlantedGraph> {
    if templates.is_empty() {
        return Err(Error::InvalidParameter("template set is empty".into()));
    }
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    let mut edges = Vec::new();
    let mut true_role = Vec::new();
    let mut role_names: Vec<String> = Vec::new();
    let mut role_index: BTreeMap<String, usize> = BTreeMap::new();

    for template in templates {
        template.validate()?;
        let (local_edges, local_roles) = template.build();
        let ids: Vec<usize> = local_roles
            .iter()
            .map(|name| {
                *role_index.entry(name.clone()).or_insert_with(|| {
                    role_names.push(name.clone());
                    role_names.len() - 1
                })
            })
            .collect();
        for _ in 0..copies {
            let base = true_role.len();
            edges.extend(local_edges.iter().map(|&(u, v)| (base + u, base + v)));
            true_role.extend_from_slice(&ids);
        }
    }

    let n = true_role.len();
    let max_edges = n * (n - 1) / 2;
    let mut present: HashSet<(usize, usize)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    if present.len() + noise_edges > max_edges {
        return Err(Error::InvalidParameter(format!(
            "cannot add {noise_edges} noise edges to a graph with {} of {max_edges} possible edges",
            present.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added = 0;
    while added < noise_edges {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && present.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
            added += 1;
        }
    }

    let graph = Graph::from_edges(n, edges)?.0;
    Ok(PlantedGraph {
        graph,
        true_role,
        role_names,
    })
}
