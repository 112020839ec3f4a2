//! `mtese`: corpus analytics for machine-translationese detection.
//!
//! Exit codes: 0 success, 1 invalid configuration or flags, 2 unusable data
//! or artifacts, 3 internal failure.

mod commands;
mod config;
mod error;
mod manifest;
mod pipeline;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtese_core::synth::SynthConfig;

use crate::config::{Needs, RunConfig};
use crate::error::{CliError, Result};

#[derive(Parser)]
#[command(name = "mtese", version, about = "Corpus analytics for machine-translationese detection")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "MTESE_CONFIG")]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core (overrides the config).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct InputArgs {
    /// Tagged corpus file (repeatable; replaces the configured list).
    #[arg(long = "corpus")]
    corpora: Vec<PathBuf>,
    #[arg(long)]
    tagset: Option<PathBuf>,
    #[arg(long)]
    frequency_lexicon: Option<PathBuf>,
    #[arg(long)]
    concreteness_lexicon: Option<PathBuf>,
    #[arg(long)]
    reference_corpus: Option<PathBuf>,
    /// Cached reference profile from an earlier `extract`.
    #[arg(long)]
    reference_profile: Option<PathBuf>,
}

#[derive(Args, Default)]
struct SelectArgs {
    /// Features kept per level.
    #[arg(long)]
    k: Option<usize>,
    /// Quantile bins for the χ² test.
    #[arg(long)]
    bins: Option<usize>,
    /// Grouping to run (repeatable; replaces the configured list).
    #[arg(long = "grouping")]
    groupings: Vec<String>,
}

#[derive(Args, Default)]
struct ClassifyArgs {
    #[arg(long)]
    folds: Option<usize>,
    /// Skip the pairwise source heatmap.
    #[arg(long)]
    no_heatmap: bool,
}

#[derive(Args, Default)]
struct ClusterArgs {
    /// Number of clusters.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Cluster raw values instead of z-scores.
    #[arg(long)]
    no_standardize: bool,
}

#[derive(Args, Default)]
struct ContrastArgs {
    /// Feature to contrast (repeatable; replaces the configured list).
    #[arg(long = "feature")]
    features: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate the corpora; tabulate texts, tokens and types.
    Ingest(InputArgs),
    /// Extract the feature matrix.
    Extract(InputArgs),
    /// χ² feature selection per grouping and feature level.
    Select(SelectArgs),
    /// Evaluate the five classifiers; write the results table and heatmap.
    Classify {
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
    },
    /// k-means on the shared top features, scored by ARI.
    Cluster(ClusterArgs),
    /// Per-feature group contrasts with box plots.
    Contrast(ContrastArgs),
    /// Consolidated Markdown report of the run directory.
    Report,
    /// Every step from ingest to report.
    Run {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        classify: ClassifyArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        contrast: ContrastArgs,
    },
    /// Write a planted-signal demo corpus, lexicons and config.
    Synth {
        /// Target directory.
        dir: PathBuf,
        #[arg(long, default_value_t = SynthConfig::default().docs_per_group)]
        docs: usize,
        #[arg(long, default_value_t = SynthConfig::default().sentences_per_doc)]
        sentences: usize,
        #[arg(long, default_value_t = SynthConfig::default().reference_docs)]
        reference_docs: usize,
        /// Seed of the generator (distinct from the analysis seed).
        #[arg(long, default_value_t = SynthConfig::default().seed)]
        corpus_seed: u64,
    },
}

impl InputArgs {
    fn apply(self, cfg: &mut RunConfig) {
        let i = &mut cfg.inputs;
        if !self.corpora.is_empty() {
            i.corpora = self.corpora;
        }
        let set = |slot: &mut Option<PathBuf>, v: Option<PathBuf>| {
            if v.is_some() {
                *slot = v;
            }
        };
        set(&mut i.tagset, self.tagset);
        set(&mut i.frequency_lexicon, self.frequency_lexicon);
        set(&mut i.concreteness_lexicon, self.concreteness_lexicon);
        // a reference given on the command line replaces either configured kind
        if self.reference_corpus.is_some() || self.reference_profile.is_some() {
            i.reference_corpus = self.reference_corpus;
            i.reference_profile = self.reference_profile;
        }
    }
}

impl SelectArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.selection.k = self.k.unwrap_or(cfg.selection.k);
        cfg.selection.bins = self.bins.unwrap_or(cfg.selection.bins);
        if !self.groupings.is_empty() {
            cfg.groupings.run = self.groupings;
        }
    }
}

impl ClassifyArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.classify.folds = self.folds.unwrap_or(cfg.classify.folds);
        cfg.classify.heatmap &= !self.no_heatmap;
    }
}

impl ClusterArgs {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.cluster.k = self.clusters.unwrap_or(cfg.cluster.k);
        cfg.cluster.restarts = self.restarts.unwrap_or(cfg.cluster.restarts);
        cfg.cluster.standardize &= !self.no_standardize;
    }
}

impl ContrastArgs {
    fn apply(self, cfg: &mut RunConfig) {
        if !self.features.is_empty() {
            cfg.contrast.features = self.features;
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let mut cfg = resolve(&cli)?;
    if cfg.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global()
            .map_err(|e| CliError::internal("thread pool", e))?;
    }
    match cli.command {
        Command::Ingest(a) => {
            a.apply(&mut cfg);
            commands::ingest::run(&cfg)
        }
        Command::Extract(a) => {
            a.apply(&mut cfg);
            commands::extract::run(&cfg)
        }
        Command::Select(a) => {
            a.apply(&mut cfg);
            commands::select::run(&cfg)
        }
        Command::Classify { select, classify } => {
            select.apply(&mut cfg);
            classify.apply(&mut cfg);
            commands::classify::run(&cfg)
        }
        Command::Cluster(a) => {
            a.apply(&mut cfg);
            commands::cluster::run(&cfg)
        }
        Command::Contrast(a) => {
            a.apply(&mut cfg);
            commands::contrast::run(&cfg)
        }
        Command::Report => {
            cfg.validate(Needs::Nothing)?;
            commands::report::run(&cfg.out)
        }
        Command::Run { inputs, select, classify, cluster, contrast } => {
            inputs.apply(&mut cfg);
            select.apply(&mut cfg);
            classify.apply(&mut cfg);
            cluster.apply(&mut cfg);
            contrast.apply(&mut cfg);
            cfg.validate(Needs::Extraction)?;
            commands::ingest::run(&cfg)?;
            commands::extract::run(&cfg)?;
            commands::select::run(&cfg)?;
            commands::classify::run(&cfg)?;
            commands::cluster::run(&cfg)?;
            commands::contrast::run(&cfg)?;
            commands::report::run(&cfg.out)
        }
        Command::Synth { dir, docs, sentences, reference_docs, corpus_seed } => {
            let synth = SynthConfig { docs_per_group: docs, sentences_per_doc: sentences, reference_docs, seed: corpus_seed };
            commands::synth::run(&dir, &synth, cfg.seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match std::panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("error: internal failure (see the panic message above)");
            ExitCode::from(3)
        }
    }
}
