//! Loading inputs and upstream artifacts, and the selection step shared by
//! several commands.

use std::io::BufReader;
use std::path::Path;

use mtese_core::corpus::{parse_corpus, ParseWarning};
use mtese_core::features::{FeatureInventory, KeyedGram, Layer, NposWarning};
use mtese_core::grouping::{Comparison, EngineRegistry, GroupingError};
use mtese_core::matrix::Dataset;
use mtese_core::selection::{chi2_rank, select_layers, select_top_k, SelectionResult};
use mtese_core::{Corpus, FeatureMatrix, Tagset};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::manifest::{read_verified, Manifest, StepWriter};

pub const FEATURES_CSV: &str = "extract/features.csv";
pub const INVENTORY_JSON: &str = "extract/inventory.json";

/// Feature levels of the results table: each layer, then all features.
pub const ALL_LEVEL: &str = "all";

pub fn levels() -> Vec<&'static str> {
    Layer::ALL.iter().map(Layer::as_str).chain([ALL_LEVEL]).collect()
}

/// Row label of a level in the results table.
pub fn level_label(level: &str) -> &str {
    match level {
        "lexical" => "Lexical",
        "syntactical" => "Syntactical",
        "readability" => "Readability",
        "translatability" => "Translatability",
        "npos" => "N-POS-gram",
        ALL_LEVEL => "All Features",
        other => other,
    }
}

/// File-name friendly form of a grouping or feature name.
pub fn slug(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InventoryArtifact {
    pub tagset_id: String,
    pub documents: usize,
    pub layer_counts: Vec<(String, usize)>,
    pub engines: EngineRegistry,
    pub inventory: FeatureInventory,
    pub npos_ranked: Vec<KeyedGram>,
    pub npos_warnings: Vec<NposWarning>,
}

pub fn load_tagset(cfg: &RunConfig, step: &mut StepWriter) -> Result<Tagset> {
    match &cfg.inputs.tagset {
        None => Ok(Tagset::ltp()),
        Some(p) => {
            let bytes = step.input_file(p)?;
            let text = String::from_utf8(bytes).map_err(|e| CliError::data(p.display(), e))?;
            Tagset::parse(&text).map_err(|e| CliError::data(p.display(), e))
        }
    }
}

pub fn warning_text(w: &ParseWarning) -> String {
    match w {
        ParseWarning::RootCount { doc_id, line, roots } => {
            format!("document `{doc_id}`, line {line}: sentence has {roots} root tokens")
        }
    }
}

pub fn parse_file(path: &Path, tagset: &Tagset, step: &mut StepWriter) -> Result<(Corpus, Vec<String>)> {
    let bytes = step.input_file(path)?;
    let parsed = parse_corpus(BufReader::new(bytes.as_slice()), tagset).map_err(|e| CliError::data(path.display(), e))?;
    let warnings = parsed.warnings.iter().map(|w| format!("{}: {}", path.display(), warning_text(w))).collect();
    Ok((parsed.corpus, warnings))
}

/// Parses and merges every configured corpus.
pub fn load_corpora(cfg: &RunConfig, tagset: &Tagset, step: &mut StepWriter) -> Result<(Corpus, Vec<String>)> {
    let mut parts = Vec::new();
    let mut warnings = Vec::new();
    for path in &cfg.inputs.corpora {
        let (c, w) = parse_file(path, tagset, step)?;
        log::info!("{}: {} documents", path.display(), c.len());
        parts.push(c);
        warnings.extend(w);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let corpus = Corpus::merge(parts).map_err(|e| CliError::data("merging corpora", e))?;
    Ok((corpus, warnings))
}

/// The feature matrix and inventory of the last `extract`, digest-checked.
pub struct Extracted {
    pub matrix: FeatureMatrix,
    pub inventory: InventoryArtifact,
}

pub fn load_extracted(cfg: &RunConfig, step: &mut StepWriter) -> Result<Extracted> {
    let manifest = Manifest::require(&cfg.out, "extract")?;
    let inv = read_verified(&cfg.out, &manifest, "extract", INVENTORY_JSON)?;
    let features = read_verified(&cfg.out, &manifest, "extract", FEATURES_CSV)?;
    step.input_artifact(&inv.rel, &inv.digest);
    step.input_artifact(&features.rel, &features.digest);
    let mut inventory: InventoryArtifact = inv.json()?;
    inventory.inventory = inventory.inventory.reindexed().map_err(|e| CliError::data(INVENTORY_JSON, e))?;
    let matrix = FeatureMatrix::read_csv(features.csv_body(), &inventory.engines)
        .map_err(|e| CliError::data(FEATURES_CSV, e))?;
    if !matrix.feature_names().iter().map(String::as_str).eq(inventory.inventory.names()) {
        return Err(CliError::Data(format!("{FEATURES_CSV} columns do not match {INVENTORY_JSON}")));
    }
    Ok(Extracted { matrix, inventory })
}

/// Dataset of a grouping. Built-in groupings that find fewer than two classes
/// in this corpus are skipped (`None`); every other failure is an error.
pub fn grouping_dataset(c: &Comparison, matrix: &FeatureMatrix) -> Result<Option<Dataset>> {
    match c.dataset(matrix) {
        Ok(d) => Ok(Some(d)),
        Err(e @ GroupingError::TooFewClasses { .. }) if !matches!(c, Comparison::Custom { .. }) => {
            log::warn!("skipping {e}");
            Ok(None)
        }
        Err(e) => Err(CliError::Data(e.to_string())),
    }
}

/// χ² selection of one level for one grouping.
pub fn select_level(grouping: &str, data: &Dataset, inv: &FeatureInventory, level: &str, cfg: &RunConfig) -> Result<SelectionResult> {
    let s = &cfg.selection;
    let ctx = |e: &dyn std::fmt::Display| CliError::Data(format!("grouping `{grouping}`, level {level}: {e}"));
    if level == ALL_LEVEL {
        let layers: Vec<(String, Vec<String>)> = Layer::ALL
            .iter()
            .map(|l| (l.as_str().to_string(), inv.layer_names(*l).into_iter().map(str::to_string).collect()))
            .collect();
        return select_layers(data, &layers, s.scope.into(), s.k, s.bins).map_err(|e| ctx(&e));
    }
    let layer = Layer::parse(level).expect("levels come from Layer::ALL");
    let names = inv.layer_names(layer);
    if names.is_empty() {
        return Err(ctx(&"layer has no features"));
    }
    let sub = data.select_features(&names).map_err(|e| ctx(&e))?;
    let ranked = chi2_rank(&sub, s.bins).map_err(|e| ctx(&e))?;
    Ok(select_top_k(&ranked, s.k))
}

pub fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), String>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| CliError::internal("writing CSV", e))?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_levels_with_table_labels() {
        let l = levels();
        assert_eq!(l.len(), 6);
        assert_eq!(level_label(l[4]), "N-POS-gram");
        assert_eq!(level_label(l[5]), "All Features");
    }

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("AvgWordLength(char.)"), "AvgWordLength_char__");
        assert_eq!(slug("OCN-MTs"), "OCN-MTs");
    }
}
