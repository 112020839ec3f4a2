//! Builds the inventory and the document × feature matrix.

use std::path::Path;

use mtese_core::features::{
    build_reference_profile, default_inventory, extract_all, Diagnostics, Layer, LexiconKind, LexiconResource,
    NposWarning, ReferenceProfile, Resources,
};
use mtese_core::grouping::EngineRegistry;
use mtese_core::Tagset;
use serde::Serialize;

use crate::config::{Needs, RunConfig};
use crate::error::{CliError, Result};
use crate::manifest::StepWriter;
use crate::pipeline::{csv_bytes, load_corpora, load_tagset, parse_file, InventoryArtifact, FEATURES_CSV, INVENTORY_JSON};

pub const DIAGNOSTICS_JSON: &str = "extract/diagnostics.json";
pub const PROFILE_JSON: &str = "extract/reference_profile.json";

#[derive(Serialize)]
struct DiagnosticsArtifact<'a> {
    parse_warnings: &'a [String],
    npos_warnings: &'a [NposWarning],
    extraction: &'a Diagnostics,
}

fn lexicon(step: &mut StepWriter, path: &Path, kind: LexiconKind) -> Result<LexiconResource> {
    let bytes = step.input_file(path)?;
    LexiconResource::from_reader(kind, bytes.as_slice()).map_err(|e| CliError::data(path.display(), e))
}

fn reference(cfg: &RunConfig, tagset: &Tagset, step: &mut StepWriter) -> Result<ReferenceProfile> {
    if let Some(p) = &cfg.inputs.reference_profile {
        let bytes = step.input_file(p)?;
        return ReferenceProfile::read_cache(bytes.as_slice(), tagset.id()).map_err(|e| CliError::data(p.display(), e));
    }
    let p = cfg.inputs.reference_corpus.as_ref().expect("validated: reference corpus or profile");
    let (corpus, warnings) = parse_file(p, tagset, step)?;
    for w in warnings {
        log::warn!("reference {w}");
    }
    build_reference_profile(&corpus, tagset.id()).map_err(|e| CliError::data(p.display(), e))
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    cfg.validate(Needs::Extraction)?;
    let mut step = StepWriter::new(cfg, "extract")?;
    let tagset = load_tagset(cfg, &mut step)?;
    let (corpus, parse_warnings) = load_corpora(cfg, &tagset, &mut step)?;
    let frequency = lexicon(&mut step, cfg.inputs.frequency_lexicon.as_ref().expect("validated"), LexiconKind::Frequency)?;
    let concreteness =
        lexicon(&mut step, cfg.inputs.concreteness_lexicon.as_ref().expect("validated"), LexiconKind::Concreteness)?;
    let profile = reference(cfg, &tagset, &mut step)?;

    let (inventory, npos) = default_inventory(&tagset, &corpus, &profile, cfg.features.npos_sizes)
        .map_err(|e| CliError::data("building the feature inventory", e))?;
    for w in &npos.warnings {
        log::warn!("{w:?}");
    }
    let extraction = extract_all(&corpus, &inventory, &Resources::new(frequency, concreteness))
        .map_err(|e| CliError::data("feature extraction", e))?;
    let matrix = extraction.matrix;
    let mut engines = EngineRegistry::default();
    engines.absorb(&corpus);

    let body = csv_bytes(|buf| matrix.write_csv(buf).map_err(|e| e.to_string()))?;
    step.write_csv(FEATURES_CSV, &body)?;
    let layer_counts: Vec<(String, usize)> =
        Layer::ALL.iter().map(|l| (l.as_str().to_string(), inventory.layer_names(*l).len())).collect();
    let artifact = InventoryArtifact {
        tagset_id: tagset.id().into(),
        documents: matrix.n_docs(),
        layer_counts: layer_counts.clone(),
        engines,
        inventory,
        npos_ranked: npos.ranked,
        npos_warnings: npos.warnings,
    };
    step.write_json(INVENTORY_JSON, &artifact)?;
    let diagnostics = DiagnosticsArtifact {
        parse_warnings: &parse_warnings,
        npos_warnings: &artifact.npos_warnings,
        extraction: &extraction.diagnostics,
    };
    step.write_json(DIAGNOSTICS_JSON, &diagnostics)?;
    let mut cache = Vec::new();
    profile.write_cache(&mut cache).map_err(|e| CliError::internal("reference profile", e))?;
    let cache: serde_json::Value = serde_json::from_slice(&cache).map_err(|e| CliError::internal("reference profile", e))?;
    step.write_json(PROFILE_JSON, &cache)?;

    println!("{} documents x {} features", matrix.n_docs(), matrix.n_features());
    for (layer, n) in &layer_counts {
        println!("  {layer:<16} {n:>4}");
    }
    println!("  {:<16} {:>4}", "total", matrix.n_features());
    if !extraction.diagnostics.readability.is_empty() {
        log::warn!("{} readability metrics fell back to 0.0 (see {DIAGNOSTICS_JSON})", extraction.diagnostics.readability.len());
    }
    step.finish()
}
