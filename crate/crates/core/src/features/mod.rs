//! Five-layer feature extraction.
//!
//! Every feature is a ratio or a per-unit measure so documents of different
//! lengths stay comparable. [`extract_all`] assembles the layers for a corpus
//! in [`FeatureInventory`] order.

mod inventory;
mod lexical;
mod npos;
mod readability;
mod syntactic;
mod translatability;
pub(crate) mod wordclass;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use inventory::{
    dep_ratio_name, npos_name, parse_npos_name, pos_ratio_name, Domain, FeatureInventory, FeatureMeta, Layer,
    Resource, SubLayer, DEFAULT_NPOS_SIZES,
};
pub use lexical::{extract_lexical, mtld, sttr, ttr, MTLD_THRESHOLD, STTR_WINDOW};
pub use npos::{
    build_reference_profile, extract_npos, keyness, select_npos_inventory, KeyedGram, NposSelection, NposWarning,
    ReferenceProfile, MAX_N,
};
pub use readability::{
    default_metrics, extract_readability, AverageWordFrequency, Coverage, LexicalRichness, LexiconError,
    LexiconKind, LexiconResource, Lexicons, ReadabilityMetric, ReadabilityOutput, ReadabilityWarning,
    SemanticAccuracy, SemanticNoise, SyntacticRichness, WordClassSel,
};
pub use syntactic::extract_syntactical;
pub use translatability::{extract_translatability, TranslatabilityOutput, UNTRANSLATED_RUN_WORDS};

use crate::corpus::{Corpus, Document, GroupLabel};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("feature `{0}` appears twice in the inventory")]
    DuplicateFeature(String),
    #[error("`{0}` is not a valid N-PoS-gram feature name")]
    BadFeatureName(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("N-PoS-gram sizes must be positive, got {0:?}")]
    InvalidSizes([usize; 3]),
    #[error("tagset mismatch: expected `{expected}`, found `{found}`")]
    TagsetMismatch { expected: String, found: String },
    #[error("reference profile cache: {0}")]
    ProfileCache(String),
    #[error("document `{doc_id}`: inventory feature `{feature}` was not produced by any extractor")]
    MissingFeature { doc_id: String, feature: String },
    #[error("document `{doc_id}`: feature `{feature}` is not finite ({value})")]
    NonFinite { doc_id: String, feature: String, value: f64 },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// Named scalar features of one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub doc_id: String,
    pub values: IndexMap<String, f64>,
}

impl FeatureVector {
    pub fn new(doc_id: impl Into<String>) -> Self {
        FeatureVector { doc_id: doc_id.into(), values: IndexMap::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn extend(&mut self, other: FeatureVector) {
        self.values.extend(other.values);
    }
}

pub(crate) fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Everything extraction reads besides the corpus.
pub struct Resources {
    pub frequency: LexiconResource,
    pub concreteness: LexiconResource,
    pub readability_metrics: Vec<Box<dyn ReadabilityMetric>>,
}

impl Resources {
    pub fn new(frequency: LexiconResource, concreteness: LexiconResource) -> Self {
        Resources { frequency, concreteness, readability_metrics: default_metrics() }
    }

    fn lexicons(&self) -> Lexicons<'_> {
        Lexicons { frequency: &self.frequency, concreteness: &self.concreteness }
    }
}

/// Per-document extraction diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub coverage: Vec<(String, Coverage)>,
    pub readability: Vec<ReadabilityWarning>,
    /// Documents without Han characters (foreignness fallback applied).
    pub no_han: Vec<String>,
}

pub struct Extraction {
    pub matrix: FeatureMatrix,
    pub diagnostics: Diagnostics,
}

struct DocResult {
    values: Vec<f64>,
    coverage: Coverage,
    readability: Vec<ReadabilityWarning>,
    no_han: bool,
}

fn extract_doc(doc: &Document, inventory: &FeatureInventory, resources: &Resources) -> Result<DocResult, FeatureError> {
    let mut all = extract_lexical(doc, inventory);
    all.extend(extract_syntactical(doc, inventory));
    let read = extract_readability(doc, &resources.readability_metrics, resources.lexicons());
    all.extend(read.values);
    let trans = extract_translatability(doc);
    all.extend(trans.values);
    all.extend(extract_npos(doc, &inventory.npos_grams()));

    let mut values = Vec::with_capacity(inventory.len());
    for name in inventory.names() {
        let v = all.get(name).ok_or_else(|| FeatureError::MissingFeature {
            doc_id: doc.doc_id().into(),
            feature: name.into(),
        })?;
        if !v.is_finite() {
            return Err(FeatureError::NonFinite { doc_id: doc.doc_id().into(), feature: name.into(), value: v });
        }
        values.push(v);
    }
    Ok(DocResult { values, coverage: read.coverage, readability: read.warnings, no_han: trans.no_han })
}

/// Extracts the full matrix. Documents are processed in parallel; the output
/// order and every value are independent of scheduling.
pub fn extract_all(corpus: &Corpus, inventory: &FeatureInventory, resources: &Resources) -> Result<Extraction, FeatureError> {
    let results: Vec<DocResult> = corpus
        .documents()
        .par_iter()
        .map(|d| extract_doc(d, inventory, resources))
        .collect::<Result<_, _>>()?;
    let mut diagnostics = Diagnostics::default();
    let mut rows = Vec::with_capacity(results.len());
    for (doc, r) in corpus.documents().iter().zip(results) {
        diagnostics.coverage.push((doc.doc_id().to_string(), r.coverage));
        diagnostics.readability.extend(r.readability);
        if r.no_han {
            diagnostics.no_han.push(doc.doc_id().to_string());
        }
        rows.push(r.values);
    }
    let doc_ids = corpus.documents().iter().map(|d| d.doc_id().to_string()).collect();
    let groups: Vec<GroupLabel> = corpus.documents().iter().map(|d| d.group().clone()).collect();
    let names = inventory.names().map(str::to_string).collect();
    let matrix = FeatureMatrix::new(doc_ids, names, rows, groups).expect("extraction output is rectangular");
    Ok(Extraction { matrix, diagnostics })
}

/// Builds the default 236-feature inventory for `target`: the fixed layers of
/// its tagset plus the top N-PoS-grams by keyness against `reference`.
pub fn default_inventory(
    tagset: &crate::corpus::Tagset,
    target: &Corpus,
    reference: &ReferenceProfile,
    sizes: [usize; MAX_N],
) -> Result<(FeatureInventory, NposSelection), FeatureError> {
    if sizes.contains(&0) {
        return Err(FeatureError::InvalidSizes(sizes));
    }
    let selection = select_npos_inventory(target, reference, sizes)?;
    let inventory = FeatureInventory::base(tagset).with_npos(&selection.names)?;
    Ok((inventory, selection))
}
