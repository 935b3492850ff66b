mod commands;
mod config;
mod io;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use commands::Run;
use config::{Candidate, Config};
use manifest::{unix_now, Manifest, FAILED_FILE};

const DEFAULT_OUT: &str = "orbitrole-out";

#[derive(Debug, Parser)]
#[command(
    name = "orbitrole",
    version,
    about = "Structural roles explained through graphlet orbits"
)]
struct Cli {
    /// Master seed; every stage derives its own seed from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "ORBITROLE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count the 73 graphlet orbits of every node.
    Census { graph: PathBuf },
    /// Compute role embeddings.
    Embed {
        graph: PathBuf,
        /// graphwave or rolx; repeat for several.
        #[arg(long = "method")]
        methods: Vec<String>,
        #[arg(long)]
        rolx_rank: Option<usize>,
        /// Precomputed embedding CSV to carry along; repeatable.
        #[arg(long = "import")]
        imports: Vec<PathBuf>,
    },
    /// k-means role assignment from an embedding CSV.
    Cluster {
        embedding: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Orbit-space silhouette sweep over embeddings and k.
    Validate {
        #[arg(long)]
        orbits: PathBuf,
        #[arg(long = "embedding", required = true)]
        embeddings: Vec<PathBuf>,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        sample_cap: Option<usize>,
    },
    /// Surrogate forest, permutation importance and effect curves for a role set.
    Explain {
        #[arg(long)]
        orbits: PathBuf,
        #[arg(long)]
        roles: PathBuf,
        #[command(flatten)]
        explain: ExplainFlags,
    },
    /// Rao-Stirling diversity per node, binned by degree and role.
    Idr {
        graph: PathBuf,
        /// Node table CSV with `id` and `category` columns.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        roles: PathBuf,
        #[command(flatten)]
        idr: IdrFlags,
    },
    /// Census, embeddings, sweep, role sets, explanations and (with labels) diversity.
    Pipeline {
        graph: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long = "method")]
        methods: Vec<String>,
        #[arg(long)]
        rolx_rank: Option<usize>,
        #[arg(long = "import")]
        imports: Vec<PathBuf>,
        #[arg(long)]
        k_min: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        /// Role set to explain as `method:k`; repeatable.
        #[arg(long = "candidate")]
        candidates: Vec<String>,
        #[command(flatten)]
        explain: ExplainFlags,
        #[command(flatten)]
        idr: IdrFlags,
    },
    /// Planted-role benchmark graph.
    Generate {
        /// `barbell:C:B`, `starbarbell:L:B`, `chain:L`, `star:L` or `clique:S`; repeatable.
        #[arg(long = "template")]
        templates: Vec<String>,
        #[arg(long)]
        copies: Option<usize>,
        #[arg(long)]
        noise: Option<usize>,
    },
    /// Repeat a run from its manifest with the recorded configuration.
    Rerun { manifest: PathBuf },
}

#[derive(Debug, clap::Args)]
struct ExplainFlags {
    /// Also refit on the nodes holding these roles (comma separated).
    #[arg(long, value_delimiter = ',')]
    keep_roles: Vec<usize>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    exclude_orbits: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    effect_orbits: Vec<usize>,
}

#[derive(Debug, clap::Args)]
struct IdrFlags {
    /// citing, cited or all.
    #[arg(long)]
    direction: Option<String>,
    /// uniform or cocitation_cosine.
    #[arg(long)]
    distance: Option<String>,
    #[arg(long)]
    min_per_role: Option<usize>,
}

fn set_some<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn set_nonempty<T>(slot: &mut Vec<T>, value: Vec<T>) {
    if !value.is_empty() {
        *slot = value;
    }
}

impl ExplainFlags {
    fn apply(self, config: &mut Config) {
        let e = &mut config.explain;
        set_nonempty(&mut e.keep_roles, self.keep_roles);
        set_some(&mut e.trees, self.trees);
        set_some(&mut e.repeats, self.repeats);
        set_nonempty(&mut e.exclude_orbits, self.exclude_orbits);
        set_nonempty(&mut e.effect_orbits, self.effect_orbits);
    }
}

impl IdrFlags {
    fn apply(self, config: &mut Config) {
        set_some(&mut config.idr.direction, self.direction);
        set_some(&mut config.idr.distance, self.distance);
        set_some(&mut config.idr.min_per_role, self.min_per_role);
    }
}

fn parse_candidate(text: &str) -> Result<Candidate> {
    let (method, k) = text
        .rsplit_once(':')
        .with_context(|| format!("candidate `{text}` must look like method:k"))?;
    let k = k
        .parse()
        .with_context(|| format!("candidate `{text}`: bad k"))?;
    Ok(Candidate {
        method: method.to_string(),
        k,
    })
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Census { .. } => "census",
        Command::Embed { .. } => "embed",
        Command::Cluster { .. } => "cluster",
        Command::Validate { .. } => "validate",
        Command::Explain { .. } => "explain",
        Command::Idr { .. } => "idr",
        Command::Pipeline { .. } => "pipeline",
        Command::Generate { .. } => "generate",
        Command::Rerun { .. } => "rerun",
    }
}

/// Folds the command's flags into `config`; flags win.
fn apply_flags(command: Command, config: &mut Config) -> Result<Command> {
    Ok(match command {
        Command::Embed {
            graph,
            methods,
            rolx_rank,
            imports,
        } => {
            set_nonempty(&mut config.embed.methods, methods);
            set_some(&mut config.embed.rolx_rank, rolx_rank);
            set_nonempty(&mut config.embed.imports, imports);
            Command::Embed {
                graph,
                methods: Vec::new(),
                rolx_rank: None,
                imports: Vec::new(),
            }
        }
        Command::Validate {
            orbits,
            embeddings,
            k_min,
            k_max,
            sample_cap,
        } => {
            set_some(&mut config.cluster.k_min, k_min);
            set_some(&mut config.cluster.k_max, k_max);
            set_some(&mut config.cluster.sample_cap, sample_cap);
            Command::Validate {
                orbits,
                embeddings,
                k_min: None,
                k_max: None,
                sample_cap: None,
            }
        }
        Command::Explain {
            orbits,
            roles,
            explain,
        } => {
            explain.apply(config);
            Command::Explain {
                orbits,
                roles,
                explain: ExplainFlags::empty(),
            }
        }
        Command::Idr {
            graph,
            labels,
            roles,
            idr,
        } => {
            idr.apply(config);
            Command::Idr {
                graph,
                labels,
                roles,
                idr: IdrFlags::empty(),
            }
        }
        Command::Pipeline {
            graph,
            labels,
            methods,
            rolx_rank,
            imports,
            k_min,
            k_max,
            candidates,
            explain,
            idr,
        } => {
            set_nonempty(&mut config.embed.methods, methods);
            set_some(&mut config.embed.rolx_rank, rolx_rank);
            set_nonempty(&mut config.embed.imports, imports);
            set_some(&mut config.cluster.k_min, k_min);
            set_some(&mut config.cluster.k_max, k_max);
            let candidates = candidates
                .iter()
                .map(|c| parse_candidate(c))
                .collect::<Result<Vec<_>>>()?;
            set_nonempty(&mut config.cluster.candidates, candidates);
            explain.apply(config);
            idr.apply(config);
            Command::Pipeline {
                graph,
                labels,
                methods: Vec::new(),
                rolx_rank: None,
                imports: Vec::new(),
                k_min: None,
                k_max: None,
                candidates: Vec::new(),
                explain: ExplainFlags::empty(),
                idr: IdrFlags::empty(),
            }
        }
        Command::Generate {
            templates,
            copies,
            noise,
        } => {
            set_nonempty(&mut config.generate.templates, templates);
            set_some(&mut config.generate.copies, copies);
            set_some(&mut config.generate.noise_edges, noise);
            Command::Generate {
                templates: Vec::new(),
                copies: None,
                noise: None,
            }
        }
        other => other,
    })
}

impl ExplainFlags {
    fn empty() -> Self {
        ExplainFlags {
            keep_roles: Vec::new(),
            trees: None,
            repeats: None,
            exclude_orbits: Vec::new(),
            effect_orbits: Vec::new(),
        }
    }
}

impl IdrFlags {
    fn empty() -> Self {
        IdrFlags {
            direction: None,
            distance: None,
            min_per_role: None,
        }
    }
}

fn dispatch(run: &mut Run, command: &Command) -> Result<()> {
    match command {
        Command::Census { graph } => commands::census(run, graph),
        Command::Embed { graph, .. } => commands::embed(run, graph),
        Command::Cluster { embedding, k } => commands::cluster(run, embedding, *k),
        Command::Validate {
            orbits, embeddings, ..
        } => commands::validate(run, orbits, embeddings),
        Command::Explain { orbits, roles, .. } => commands::explain(run, orbits, roles),
        Command::Idr {
            graph,
            labels,
            roles,
            ..
        } => commands::idr(run, graph, labels, roles),
        Command::Pipeline { graph, labels, .. } => {
            commands::pipeline(run, graph, labels.as_deref())
        }
        Command::Generate { .. } => commands::generate(run),
        Command::Rerun { .. } => unreachable!("rerun is resolved before dispatch"),
    }
}

/// Runs one parsed command line. `recorded` replaces config loading when
/// repeating a run from its manifest.
fn execute(cli: Cli, args: Vec<String>, recorded: Option<Config>) -> Result<()> {
    if let Command::Rerun { manifest } = &cli.command {
        return rerun(manifest, cli.out.clone());
    }
    let mut config = match recorded {
        Some(config) => config,
        None => config::load(cli.config.as_deref())?,
    };
    set_some(&mut config.seed, cli.seed);
    let name = command_name(&cli.command);
    let command = apply_flags(cli.command, &mut config)?;

    let out = cli.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&out)
        .with_context(|| format!("creating output directory {}", out.display()))?;
    let failed = out.join(FAILED_FILE);
    if failed.exists() {
        fs::remove_file(&failed)?;
    }
    let manifest = Manifest::new(args, name, config.clone());
    let mut run = Run::new(out, config, manifest);
    let result = dispatch(&mut run, &command);
    run.manifest.finished_unix = unix_now();
    match result {
        Ok(()) => {
            run.manifest.status = "ok".into();
            run.manifest.write(&run.out)?;
            println!("outputs in {}", run.out.display());
            Ok(())
        }
        Err(err) => {
            run.manifest.status = "failed".into();
            run.manifest.failed_stage = Some(run.stage.clone());
            run.manifest.error = Some(format!("{err:#}"));
            fs::write(&failed, format!("stage: {}\nerror: {err:#}\n", run.stage))?;
            run.manifest.write(&run.out)?;
            Err(err.context(format!("stage `{}` failed", run.stage)))
        }
    }
}

fn rerun(path: &Path, out: Option<PathBuf>) -> Result<()> {
    let recorded = Manifest::load(path)?;
    for input in &recorded.inputs {
        match manifest::digest_file(&input.path) {
            Ok(now) if now.sha256 == input.sha256 => {}
            Ok(_) => eprintln!(
                "warning: {} changed since the recorded run",
                input.path.display()
            ),
            Err(_) => bail!(
                "recorded input {} is no longer readable",
                input.path.display()
            ),
        }
    }
    let mut args = recorded.args.clone();
    if let Some(out) = out {
        args = without_out(&args);
        args.push("--out".into());
        args.push(out.to_string_lossy().into_owned());
    }
    let cli =
        Cli::try_parse_from(std::iter::once("orbitrole".to_string()).chain(args.iter().cloned()))
            .context("recorded arguments no longer parse")?;
    if matches!(cli.command, Command::Rerun { .. }) {
        bail!("manifest records a rerun; point at the original run's manifest");
    }
    execute(cli, args, Some(recorded.config))
}

/// `args` with any `--out DIR` or `--out=DIR` removed.
fn without_out(args: &[String]) -> Vec<String> {
    let mut kept = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            kept.push(a.clone());
        }
    }
    kept
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match execute(cli, args, None) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
