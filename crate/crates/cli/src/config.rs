use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use orbitrole::census::CensusConfig;
use orbitrole::embed::{GraphWaveConfig, RefexConfig, RolxConfig};
use orbitrole::explain::{ForestConfig, SurrogateConfig};
use orbitrole::idr::{Direction, DistanceMode, RaoStirlingConfig};
use serde::{Deserialize, Serialize};

/// Every tunable of every stage. Loaded from TOML, then overridden by flags;
/// the resolved value is written into the run manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub census: CensusSection,
    pub embed: EmbedSection,
    pub cluster: ClusterSection,
    pub explain: ExplainSection,
    pub idr: IdrSection,
    pub generate: GenerateSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusSection {
    pub memory_budget_bytes: u64,
}

impl Default for CensusSection {
    fn default() -> Self {
        CensusSection {
            memory_budget_bytes: CensusConfig::default().memory_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedSection {
    /// Native methods: `graphwave`, `rolx`.
    pub methods: Vec<String>,
    /// Precomputed embedding CSVs added to the native ones.
    pub imports: Vec<PathBuf>,
    pub scales: Vec<f64>,
    pub sample_points: usize,
    pub t_max: f64,
    pub exact_max_nodes: usize,
    pub chebyshev_order: usize,
    pub rolx_rank: usize,
    pub refex_depth: usize,
    pub prune_threshold: f64,
    pub nmf_max_iter: usize,
    pub nmf_tolerance: f64,
}

impl Default for EmbedSection {
    fn default() -> Self {
        let gw = GraphWaveConfig::default();
        let rolx = RolxConfig::default();
        EmbedSection {
            methods: vec!["graphwave".into(), "rolx".into()],
            imports: Vec::new(),
            scales: gw.scales,
            sample_points: gw.sample_points,
            t_max: gw.t_max,
            exact_max_nodes: gw.exact_max_nodes,
            chebyshev_order: gw.chebyshev_order,
            rolx_rank: rolx.rank,
            refex_depth: rolx.refex.depth,
            prune_threshold: rolx.refex.prune_threshold,
            nmf_max_iter: rolx.max_iter,
            nmf_tolerance: rolx.tolerance,
        }
    }
}

impl EmbedSection {
    pub fn graphwave(&self) -> GraphWaveConfig {
        GraphWaveConfig {
            scales: self.scales.clone(),
            sample_points: self.sample_points,
            t_max: self.t_max,
            d: 2 * self.scales.len() * self.sample_points,
            exact_max_nodes: self.exact_max_nodes,
            chebyshev_order: self.chebyshev_order,
        }
    }

    pub fn rolx(&self, seed: u64) -> RolxConfig {
        RolxConfig {
            rank: self.rolx_rank,
            refex: RefexConfig {
                depth: self.refex_depth,
                prune_threshold: self.prune_threshold,
            },
            max_iter: self.nmf_max_iter,
            tolerance: self.nmf_tolerance,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub method: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub k_min: usize,
    pub k_max: usize,
    pub sample_cap: usize,
    /// Role sets carried forward to explanation; empty means every method at
    /// `default_k`.
    pub candidates: Vec<Candidate>,
    pub default_k: usize,
}

impl Default for ClusterSection {
    fn default() -> Self {
        ClusterSection {
            k_min: 2,
            k_max: 19,
            sample_cap: orbitrole::cluster::DEFAULT_SAMPLE_CAP,
            candidates: Vec::new(),
            default_k: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub trees: usize,
    pub min_leaf: usize,
    pub holdout_fraction: f64,
    pub repeats: usize,
    pub bins: usize,
    pub effect_orbits: Vec<usize>,
    pub exclude_orbits: Vec<usize>,
    /// Non-empty: also refit on the nodes holding these roles.
    pub keep_roles: Vec<usize>,
    pub top: usize,
}

impl Default for ExplainSection {
    fn default() -> Self {
        let forest = ForestConfig::default();
        ExplainSection {
            trees: forest.trees,
            min_leaf: forest.min_leaf,
            holdout_fraction: 0.2,
            repeats: 5,
            bins: orbitrole::explain::DEFAULT_BINS,
            effect_orbits: vec![0, 3, 18, 27],
            exclude_orbits: Vec::new(),
            keep_roles: Vec::new(),
            top: 10,
        }
    }
}

impl ExplainSection {
    pub fn surrogate(&self) -> SurrogateConfig {
        SurrogateConfig {
            forest: ForestConfig {
                trees: self.trees,
                min_leaf: self.min_leaf,
                ..Default::default()
            },
            holdout_fraction: self.holdout_fraction,
            exclude_orbits: self.exclude_orbits.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdrSection {
    /// `citing`, `cited` or `all`.
    pub direction: String,
    /// `uniform` or `cocitation_cosine`.
    pub distance: String,
    pub halve: bool,
    pub bins: usize,
    pub min_per_role: usize,
}

impl Default for IdrSection {
    fn default() -> Self {
        IdrSection {
            direction: "citing".into(),
            distance: "uniform".into(),
            halve: false,
            bins: orbitrole::idr::DEFAULT_BINS,
            min_per_role: orbitrole::idr::DEFAULT_MIN_PER_ROLE,
        }
    }
}

impl IdrSection {
    pub fn rao_stirling(&self) -> Result<RaoStirlingConfig> {
        let direction = match self.direction.as_str() {
            "citing" => Direction::Citing,
            "cited" => Direction::Cited,
            "all" => Direction::All,
            other => bail!("unknown idr.direction `{other}` (citing, cited, all)"),
        };
        Ok(RaoStirlingConfig {
            direction,
            halve: self.halve,
        })
    }

    pub fn distance_mode(&self) -> Result<DistanceMode> {
        match self.distance.as_str() {
            "uniform" => Ok(DistanceMode::Uniform),
            "cocitation_cosine" => Ok(DistanceMode::CocitationCosine),
            other => bail!("unknown idr.distance `{other}` (uniform, cocitation_cosine)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateSection {
    pub templates: Vec<String>,
    pub copies: usize,
    pub noise_edges: usize,
}

impl Default for GenerateSection {
    fn default() -> Self {
        GenerateSection {
            templates: vec!["barbell:5:1".into()],
            copies: 20,
            noise_edges: 0,
        }
    }
}

pub fn load(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
