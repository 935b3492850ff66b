use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use orbitrole::census::{
    count_orbits_with, log_transform, read_orbit_csv, write_orbit_csv, CensusConfig,
    LogOrbitMatrix, OrbitMatrix,
};
use orbitrole::cluster::{cell_seed, kmeans, sweep, write_sweep_csv, SilhouetteSweep, SweepConfig};
use orbitrole::embed::{
    graphwave_embed, import_embedding, rolx_embed, write_embedding_csv, EmbeddingMatrix,
};
use orbitrole::explain::{
    effect_curve, orbit3_threshold, permutation_importance, refit_on_subpopulation,
    train_surrogate, write_effect_csv, write_importance_csv, EffectCurve, EffectKind,
    ImportanceReport, SurrogateForest,
};
use orbitrole::graph::{
    generate_planted_graph, load_edge_list, load_node_table, write_edge_list, IdPolicy,
    LoadedGraph, NodeTable, Template,
};
use orbitrole::idr::{
    binned_idr_report, discipline_distance, diversity_report, write_binned_csv,
    write_binned_values_csv, write_diversity_csv,
};
use orbitrole::seeds::{derive, Stage};
use orbitrole::Error;

use crate::config::{Candidate, Config};
use crate::io::{
    align_roles, read_embedding_ids, read_roles_csv, stem, table_from_ids, write_roles_csv,
};
use crate::manifest::{digest_file, sha256_hex, FileDigest, Manifest};

/// State of one invocation: where outputs go, the resolved configuration and
/// the manifest being filled in.
pub struct Run {
    pub out: PathBuf,
    pub config: Config,
    pub manifest: Manifest,
    pub stage: String,
}

impl Run {
    pub fn new(out: PathBuf, config: Config, manifest: Manifest) -> Self {
        Run {
            out,
            config,
            manifest,
            stage: "setup".into(),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.config.seed
    }

    fn stage(&mut self, name: &str) {
        self.stage = name.to_string();
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        let digest = digest_file(path)?;
        if !self.manifest.inputs.iter().any(|d| d.path == digest.path) {
            self.manifest.inputs.push(digest);
        }
        Ok(())
    }

    fn seed(&mut self, name: impl Into<String>, value: u64) -> u64 {
        self.manifest.seeds.insert(name.into(), value);
        value
    }

    fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.manifest.warnings.push(message);
    }

    /// Renders an output in memory, writes it under the output directory and
    /// records its digest.
    fn write(
        &mut self,
        name: &str,
        render: impl FnOnce(&mut Vec<u8>) -> Result<()>,
    ) -> Result<PathBuf> {
        let mut buf = Vec::new();
        render(&mut buf).with_context(|| format!("rendering {name}"))?;
        let path = self.out.join(name);
        fs::write(&path, &buf).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.retain(|d| d.path != path);
        self.manifest.outputs.push(FileDigest {
            path: path.clone(),
            sha256: sha256_hex(&buf),
        });
        Ok(path)
    }
}

fn load_graph(run: &mut Run, graph: &Path, labels: Option<&Path>) -> Result<LoadedGraph> {
    run.stage("load");
    run.input(graph)?;
    let table = match labels {
        Some(path) => {
            run.input(path)?;
            Some(load_node_table(path)?)
        }
        None => None,
    };
    let loaded = load_edge_list(graph, IdPolicy::Create, table)?;
    println!(
        "graph: {} nodes, {} edges ({} self-loops and {} duplicate edges dropped)",
        loaded.graph.node_count(),
        loaded.graph.edge_count(),
        loaded.self_loops,
        loaded.duplicates
    );
    Ok(loaded)
}

fn run_census(run: &mut Run, loaded: &LoadedGraph) -> Result<OrbitMatrix> {
    run.stage("census");
    let config = CensusConfig {
        memory_budget: run.config.census.memory_budget_bytes,
    };
    let counts = count_orbits_with(&loaded.graph, &config)?;
    run.write("orbits.csv", |buf| {
        Ok(write_orbit_csv(&counts, &loaded.table, buf)?)
    })?;
    Ok(counts)
}

pub fn census(run: &mut Run, graph: &Path) -> Result<()> {
    let loaded = load_graph(run, graph, None)?;
    let counts = run_census(run, &loaded)?;
    println!(
        "census: {} nodes x {} orbits",
        counts.node_count(),
        counts.counts.ncols()
    );
    Ok(())
}

/// Native embeddings from the configured methods followed by imports, each
/// written as `embedding_<tag>.csv`.
fn run_embeddings(run: &mut Run, loaded: &LoadedGraph) -> Result<Vec<EmbeddingMatrix>> {
    run.stage("embed");
    let mut embeddings = Vec::new();
    for method in run.config.embed.methods.clone() {
        let embedding = match method.as_str() {
            "graphwave" => graphwave_embed(&loaded.graph, &run.config.embed.graphwave())?,
            "rolx" => {
                let seed = run.seed("embed.rolx", derive(run.master_seed(), Stage::Embed, 0));
                let config = run.config.embed.rolx(seed);
                let rolx = rolx_embed(&loaded.graph, &config).map_err(|e| match e {
                    Error::InvalidParameter(msg) => anyhow::anyhow!(
                        "rolx: {msg}; set embed.rolx_rank or --rolx-rank to at most the number of kept features"
                    ),
                    other => other.into(),
                })?;
                if !rolx.converged {
                    run.warn(format!(
                        "rolx NMF stopped after {} iterations",
                        rolx.error_history.len()
                    ));
                }
                rolx.embedding
            }
            other => bail!("unknown embedding method `{other}` (graphwave, rolx)"),
        };
        embeddings.push(embedding);
    }
    for path in run.config.embed.imports.clone() {
        run.input(&path)?;
        embeddings.push(import_embedding(&path, &loaded.table)?);
    }
    if embeddings.is_empty() {
        bail!("no embedding methods or imports configured");
    }
    for (i, e) in embeddings.iter().enumerate() {
        if embeddings[..i].iter().any(|p| p.method_tag == e.method_tag) {
            bail!("two embeddings share the tag `{}`", e.method_tag);
        }
    }
    for e in &embeddings {
        run.write(&format!("embedding_{}.csv", e.method_tag), |buf| {
            Ok(write_embedding_csv(e, &loaded.table, buf)?)
        })?;
        println!(
            "embedding {}: {} x {}",
            e.method_tag,
            e.node_count(),
            e.dim()
        );
    }
    Ok(embeddings)
}

pub fn embed(run: &mut Run, graph: &Path) -> Result<()> {
    let loaded = load_graph(run, graph, None)?;
    run_embeddings(run, &loaded)?;
    Ok(())
}

pub fn cluster(run: &mut Run, embedding: &Path, k: usize) -> Result<()> {
    run.stage("load");
    run.input(embedding)?;
    let table = table_from_ids(&read_embedding_ids(embedding)?)?;
    let emb = import_embedding(embedding, &table)?;
    run.stage("cluster");
    let seed = run.seed(
        format!("cluster.{}", emb.method_tag),
        cell_seed(run.master_seed(), 0, k),
    );
    let assignment = kmeans(&emb, k, seed)?;
    if assignment.degenerate {
        run.warn(format!(
            "k-means on {} found {} non-empty clusters for k = {k}",
            emb.method_tag, assignment.k_effective
        ));
    }
    run.write(&format!("roles_{}_k{k}.csv", emb.method_tag), |buf| {
        write_roles_csv(&table, &assignment.labels, None, buf)
    })?;
    println!("cluster sizes: {:?}", assignment.cluster_sizes());
    Ok(())
}

fn run_sweep(
    run: &mut Run,
    embeddings: &[EmbeddingMatrix],
    log: &LogOrbitMatrix,
) -> Result<SilhouetteSweep> {
    run.stage("validate");
    let c = &run.config.cluster;
    let config = SweepConfig {
        k_range: c.k_min..=c.k_max,
        sample_cap: c.sample_cap,
        seed: run.master_seed(),
    };
    let result = sweep(embeddings, log, &config)?;
    run.seed("sweep", config.seed);
    if result.rows.iter().any(|r| r.sampled) {
        run.warn(format!(
            "silhouettes estimated on a sample of {} nodes",
            config.sample_cap
        ));
    }
    run.write("sweep.csv", |buf| Ok(write_sweep_csv(&result, buf)?))?;
    for e in embeddings {
        if let Some(k) = result.best_k(&e.method_tag) {
            println!("best k for {}: {k}", e.method_tag);
        }
    }
    Ok(result)
}

fn load_orbits(run: &mut Run, orbits: &Path) -> Result<(NodeTable, OrbitMatrix)> {
    run.stage("load");
    run.input(orbits)?;
    let (ids, counts) = read_orbit_csv(orbits)?;
    Ok((table_from_ids(&ids)?, counts))
}

pub fn validate(run: &mut Run, orbits: &Path, embeddings: &[PathBuf]) -> Result<()> {
    let (table, counts) = load_orbits(run, orbits)?;
    let mut loaded = Vec::new();
    for path in embeddings {
        run.input(path)?;
        loaded.push(import_embedding(path, &table)?);
    }
    run_sweep(run, &loaded, &log_transform(&counts))?;
    Ok(())
}

fn effect_curves(
    run: &mut Run,
    model: &SurrogateForest,
    features: &LogOrbitMatrix,
    tag: &str,
) -> Result<Vec<EffectCurve>> {
    let bins = run.config.explain.bins;
    let mut curves = Vec::new();
    'orbits: for orbit in run.config.explain.effect_orbits.clone() {
        if !model.feature_orbits.contains(&orbit) {
            continue;
        }
        for &class in &model.class_labels {
            for kind in [EffectKind::Ale, EffectKind::Pdp] {
                match effect_curve(model, features, orbit, class, bins, kind) {
                    Ok(curve) => curves.push(curve),
                    Err(Error::ConstantFeature(o)) => {
                        run.warn(format!("{tag}: orbit {o} is constant, no effect curve"));
                        continue 'orbits;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(curves)
}

fn importance_text(
    tag: &str,
    model: &SurrogateForest,
    report: &ImportanceReport,
    top: usize,
) -> String {
    let mut text = format!(
        "roles: {tag}\nholdout accuracy: {:.4} on {} nodes\nimportance: {} repeats on the {}\n",
        model.holdout_accuracy,
        model.holdout.len(),
        report.repeats,
        report.evaluated_on
    );
    for (rank, line) in report.table_lines(top).iter().enumerate() {
        text += &format!("{}. {line}\n", rank + 1);
    }
    text
}

/// Surrogate, permutation importance and effect curves for one role set,
/// plus the same on the kept roles when `explain.keep_roles` is set.
fn run_explain(
    run: &mut Run,
    tag: &str,
    index: u64,
    counts: &OrbitMatrix,
    log: &LogOrbitMatrix,
    labels: &[usize],
) -> Result<()> {
    run.stage("explain");
    let master = run.master_seed();
    let config = run.config.explain.surrogate();
    let repeats = run.config.explain.repeats;
    let top = run.config.explain.top;
    let threshold = orbit3_threshold(counts);
    let surrogate_seed = run.seed(
        format!("surrogate.{tag}"),
        derive(master, Stage::Surrogate, index),
    );
    let importance_seed = run.seed(
        format!("importance.{tag}"),
        derive(master, Stage::Importance, index),
    );

    let model = train_surrogate(log, labels, &config, surrogate_seed)?;
    let report = permutation_importance(&model, log, labels, repeats, importance_seed)?;
    let text = importance_text(tag, &model, &report, top);
    print!("{text}");
    run.write(&format!("importance_{tag}.csv"), |buf| {
        Ok(write_importance_csv(&report, buf)?)
    })?;
    run.write(&format!("importance_{tag}.txt"), |buf| {
        buf.extend_from_slice(text.as_bytes());
        Ok(())
    })?;
    let curves = effect_curves(run, &model, log, tag)?;
    run.write(&format!("effects_{tag}.csv"), |buf| {
        Ok(write_effect_csv(&curves, Some(threshold), buf)?)
    })?;

    let keep = run.config.explain.keep_roles.clone();
    if !keep.is_empty() {
        let sub = refit_on_subpopulation(log, labels, &keep, &config, surrogate_seed)?;
        let report = permutation_importance(
            &sub.model,
            &sub.features,
            &sub.labels,
            repeats,
            importance_seed,
        )?;
        let sub_tag = format!(
            "{tag}_roles{}",
            keep.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("-")
        );
        let text = importance_text(&sub_tag, &sub.model, &report, top);
        print!("{text}");
        run.write(&format!("subpop_importance_{tag}.csv"), |buf| {
            Ok(write_importance_csv(&report, buf)?)
        })?;
        run.write(&format!("subpop_importance_{tag}.txt"), |buf| {
            buf.extend_from_slice(text.as_bytes());
            Ok(())
        })?;
        let curves = effect_curves(run, &sub.model, &sub.features, &sub_tag)?;
        run.write(&format!("subpop_effects_{tag}.csv"), |buf| {
            Ok(write_effect_csv(&curves, Some(threshold), buf)?)
        })?;
    }
    Ok(())
}

pub fn explain(run: &mut Run, orbits: &Path, roles: &Path) -> Result<()> {
    let (table, counts) = load_orbits(run, orbits)?;
    run.input(roles)?;
    let labels = align_roles(&table, &read_roles_csv(roles)?, "the orbit table")?;
    run_explain(
        run,
        &stem(roles),
        0,
        &counts,
        &log_transform(&counts),
        &labels,
    )
}

fn run_idr(run: &mut Run, tag: &str, loaded: &LoadedGraph, roles: &[usize]) -> Result<()> {
    run.stage("idr");
    let c = &run.config.idr;
    let rs = c.rao_stirling()?;
    let (bins, min_per_role) = (c.bins, c.min_per_role);
    let dmat = discipline_distance(&loaded.table, &loaded.graph, c.distance_mode()?)?;
    let report = diversity_report(
        &loaded.graph,
        loaded.arcs.as_ref(),
        &loaded.table,
        &dmat,
        roles,
        &rs,
    )?;
    let binned = binned_idr_report(&report, bins, min_per_role)?;
    let scored = report.rows.iter().filter(|r| r.idr.is_some()).count();
    println!(
        "idr {tag}: {scored} of {} nodes scored ({}), {} of {bins} degree bins included",
        report.rows.len(),
        rs.direction.as_str(),
        binned.included_bins().len()
    );
    if binned.included_bins().is_empty() {
        run.warn(format!(
            "idr {tag}: no degree bin has more than {min_per_role} scores for every role"
        ));
    }
    run.write(&format!("idr_{tag}.csv"), |buf| {
        Ok(write_diversity_csv(&report, &loaded.table, buf)?)
    })?;
    run.write(&format!("idr_binned_{tag}.csv"), |buf| {
        Ok(write_binned_csv(&binned, buf)?)
    })?;
    run.write(&format!("idr_values_{tag}.csv"), |buf| {
        Ok(write_binned_values_csv(&binned, buf)?)
    })?;
    Ok(())
}

pub fn idr(run: &mut Run, graph: &Path, labels: &Path, roles: &Path) -> Result<()> {
    let loaded = load_graph(run, graph, Some(labels))?;
    run.input(roles)?;
    let assigned = align_roles(&loaded.table, &read_roles_csv(roles)?, "the graph")?;
    run_idr(run, &stem(roles), &loaded, &assigned)
}

fn candidates(run: &Run, embeddings: &[EmbeddingMatrix]) -> Vec<Candidate> {
    if !run.config.cluster.candidates.is_empty() {
        return run.config.cluster.candidates.clone();
    }
    embeddings
        .iter()
        .map(|e| Candidate {
            method: e.method_tag.clone(),
            k: run.config.cluster.default_k,
        })
        .collect()
}

pub fn pipeline(run: &mut Run, graph: &Path, labels: Option<&Path>) -> Result<()> {
    let loaded = load_graph(run, graph, labels)?;
    let counts = run_census(run, &loaded)?;
    let log = log_transform(&counts);
    let embeddings = run_embeddings(run, &loaded)?;
    run_sweep(run, &embeddings, &log)?;

    for (index, candidate) in candidates(run, &embeddings).into_iter().enumerate() {
        run.stage("cluster");
        let Some(m) = embeddings
            .iter()
            .position(|e| e.method_tag == candidate.method)
        else {
            bail!("candidate names unknown embedding `{}`", candidate.method);
        };
        let tag = format!("{}_k{}", candidate.method, candidate.k);
        let seed = run.seed(
            format!("cluster.{tag}"),
            cell_seed(run.master_seed(), m, candidate.k),
        );
        let assignment = kmeans(&embeddings[m], candidate.k, seed)?;
        if assignment.degenerate {
            run.warn(format!(
                "{tag}: k-means found {} non-empty clusters",
                assignment.k_effective
            ));
        }
        run.write(&format!("roles_{tag}.csv"), |buf| {
            write_roles_csv(&loaded.table, &assignment.labels, None, buf)
        })?;
        run_explain(run, &tag, index as u64, &counts, &log, &assignment.labels)?;
        if labels.is_some() {
            run_idr(run, &tag, &loaded, &assignment.labels)?;
        }
    }
    Ok(())
}

pub fn generate(run: &mut Run) -> Result<()> {
    run.stage("generate");
    let g = run.config.generate.clone();
    let templates = g
        .templates
        .iter()
        .map(|t| t.parse::<Template>())
        .collect::<orbitrole::Result<Vec<_>>>()?;
    let seed = run.seed("generate", derive(run.master_seed(), Stage::Generate, 0));
    let planted = generate_planted_graph(&templates, g.copies, g.noise_edges, seed)?;
    let table = NodeTable::sequential(planted.graph.node_count());
    run.write("graph.edges", |buf| {
        Ok(write_edge_list(&planted.graph, &table, buf)?)
    })?;
    run.write("roles.csv", |buf| {
        write_roles_csv(&table, &planted.true_role, Some(&planted.role_names), buf)
    })?;
    println!(
        "generated {} nodes, {} edges, {} roles",
        planted.graph.node_count(),
        planted.graph.edge_count(),
        planted.role_names.len()
    );
    Ok(())
}
