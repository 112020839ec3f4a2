//! Declarative run configuration (TOML) and its digest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mtese_core::features::DEFAULT_NPOS_SIZES;
use mtese_core::grouping::Comparison;
use mtese_core::selection::{SelectionScope, DEFAULT_BINS, DEFAULT_K};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Three-way origin grouping used by clustering and contrasts.
pub const ORIGIN_GROUPING: (&str, &str) = ("OCN-NMT-LLM", "OCN=OCN;NMT=NMT;LLM=LLM");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every random stream of the run derives from it.
    pub seed: u64,
    pub out: PathBuf,
    /// Worker threads, 0 for one per core.
    pub jobs: usize,
    pub inputs: Inputs,
    pub features: FeatureSettings,
    pub selection: SelectionSettings,
    pub classify: ClassifySettings,
    pub cluster: ClusterSettings,
    pub groupings: GroupingSettings,
    pub contrast: ContrastSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out: PathBuf::from("mtese-run"),
            jobs: 0,
            inputs: Inputs::default(),
            features: FeatureSettings::default(),
            selection: SelectionSettings::default(),
            classify: ClassifySettings::default(),
            cluster: ClusterSettings::default(),
            groupings: GroupingSettings::default(),
            contrast: ContrastSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub corpora: Vec<PathBuf>,
    /// Tagset declaration; the LTP inventory when absent.
    pub tagset: Option<PathBuf>,
    pub frequency_lexicon: Option<PathBuf>,
    pub concreteness_lexicon: Option<PathBuf>,
    /// Tagged reference corpus for the N-PoS-gram profile...
    pub reference_corpus: Option<PathBuf>,
    /// ...or a profile cache written by an earlier `extract`.
    pub reference_profile: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSettings {
    /// Number of 1-, 2- and 3-gram features kept by keyness.
    pub npos_sizes: [usize; 3],
}

impl Default for FeatureSettings {
    fn default() -> Self {
        FeatureSettings { npos_sizes: DEFAULT_NPOS_SIZES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    Pooled,
    PerLayer,
}

impl From<Scope> for SelectionScope {
    fn from(s: Scope) -> Self {
        match s {
            Scope::Pooled => SelectionScope::Pooled,
            Scope::PerLayer => SelectionScope::PerLayer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSettings {
    pub k: usize,
    pub bins: usize,
    /// How the all-features level ranks: one pooled ranking or top-k per layer.
    pub scope: Scope,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        SelectionSettings { k: DEFAULT_K, bins: DEFAULT_BINS, scope: Scope::Pooled }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySettings {
    pub folds: usize,
    /// TOML file overriding the pinned classifier hyperparameters.
    pub hyperparameters: Option<PathBuf>,
    /// Pairwise source heatmap.
    pub heatmap: bool,
}

impl Default for ClassifySettings {
    fn default() -> Self {
        ClassifySettings { folds: 5, hyperparameters: None, heatmap: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSettings {
    pub k: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub standardize: bool,
}

impl Default for ClusterSettings {
    fn default() -> Self {
        ClusterSettings { k: 3, restarts: 10, max_iter: 300, standardize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupingSettings {
    /// Built-in groupings to run.
    pub run: Vec<String>,
    /// Extra groupings, name → `A=OCN;B=NGT,NDL`.
    pub custom: BTreeMap<String, String>,
}

impl Default for GroupingSettings {
    fn default() -> Self {
        GroupingSettings { run: Comparison::standard().iter().map(|c| c.name().to_string()).collect(), custom: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContrastSettings {
    /// Features to contrast; empty picks the `top` χ² features of the origin grouping.
    pub features: Vec<String>,
    pub top: usize,
}

impl Default for ContrastSettings {
    fn default() -> Self {
        ContrastSettings { features: Vec::new(), top: 5 }
    }
}

/// What a command needs from the inputs section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Needs {
    Nothing,
    Corpora,
    Extraction,
}

impl RunConfig {
    /// Reads a TOML file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("reading config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out);
        self.inputs.corpora.iter_mut().for_each(fix);
        let i = &mut self.inputs;
        for p in [
            &mut i.tagset,
            &mut i.frequency_lexicon,
            &mut i.concreteness_lexicon,
            &mut i.reference_corpus,
            &mut i.reference_profile,
            &mut self.classify.hyperparameters,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    /// Every path the config refers to, with its role.
    pub fn referenced_paths(&self) -> Vec<(&'static str, &Path)> {
        let i = &self.inputs;
        let mut out: Vec<(&'static str, &Path)> = i.corpora.iter().map(|p| ("corpus", p.as_path())).collect();
        let optional = [
            ("tagset", &i.tagset),
            ("frequency lexicon", &i.frequency_lexicon),
            ("concreteness lexicon", &i.concreteness_lexicon),
            ("reference corpus", &i.reference_corpus),
            ("reference profile", &i.reference_profile),
            ("hyperparameters", &self.classify.hyperparameters),
        ];
        out.extend(optional.into_iter().filter_map(|(role, p)| p.as_deref().map(|p| (role, p))));
        out
    }

    /// Checks the resolved config before any work starts.
    pub fn validate(&self, needs: Needs) -> Result<()> {
        let invalid = |m: String| Err(CliError::Validation(m));
        for (role, p) in self.referenced_paths() {
            if !p.is_file() {
                return invalid(format!("{role} {} does not exist", p.display()));
            }
        }
        let i = &self.inputs;
        if needs != Needs::Nothing && i.corpora.is_empty() {
            return invalid("no corpus given (inputs.corpora or --corpus)".into());
        }
        if needs == Needs::Extraction {
            if i.frequency_lexicon.is_none() {
                return invalid("no frequency lexicon given".into());
            }
            if i.concreteness_lexicon.is_none() {
                return invalid("no concreteness lexicon given".into());
            }
            match (&i.reference_corpus, &i.reference_profile) {
                (None, None) => return invalid("need a reference corpus or a reference profile".into()),
                (Some(_), Some(_)) => {
                    return invalid("give either a reference corpus or a reference profile, not both".into())
                }
                _ => {}
            }
        }
        if self.features.npos_sizes.contains(&0) {
            return invalid(format!("npos_sizes must be positive, got {:?}", self.features.npos_sizes));
        }
        if self.selection.k == 0 {
            return invalid("selection k must be positive".into());
        }
        if self.selection.bins < 2 {
            return invalid(format!("need at least 2 bins, got {}", self.selection.bins));
        }
        if self.classify.folds < 2 {
            return invalid(format!("need at least 2 folds, got {}", self.classify.folds));
        }
        if self.cluster.k == 0 || self.cluster.restarts == 0 || self.cluster.max_iter == 0 {
            return invalid("cluster k, restarts and max_iter must be positive".into());
        }
        self.comparisons()?;
        Ok(())
    }

    /// Built-in groupings followed by the custom ones. Custom groupings always
    /// run; naming one in `run` is allowed and adds nothing.
    pub fn comparisons(&self) -> Result<Vec<Comparison>> {
        let mut out = Vec::new();
        for name in &self.groupings.run {
            if self.groupings.custom.contains_key(name) {
                continue;
            }
            let c: Comparison = name.parse().map_err(|e| CliError::Validation(format!("{e}")))?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        for (name, spec) in &self.groupings.custom {
            if Comparison::standard().iter().any(|c| c.name() == name) {
                return Err(CliError::Validation(format!("custom grouping `{name}` shadows a built-in one")));
            }
            let c = Comparison::parse_custom(name, spec)
                .map_err(|e| CliError::Validation(format!("custom grouping `{name}`: {e}")))?;
            out.push(c);
        }
        Ok(out)
    }

    /// The config as recorded in manifests: everything except where the
    /// outputs go and how many threads computed them.
    pub fn recorded(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(m) = v.as_object_mut() {
            m.remove("out");
            m.remove("jobs");
        }
        v
    }

    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(&self.recorded()).expect("config serializes"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
