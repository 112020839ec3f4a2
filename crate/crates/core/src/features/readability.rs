//! Readability and concreteness layer.
//!
//! The nine readability metrics sit behind [`ReadabilityMetric`] so each can
//! be swapped independently; the defaults are frequency-band and dispersion
//! statistics over a word-frequency lexicon:
//!
//! | metric | definition |
//! |---|---|
//! | `lexical_richness` | share of looked-up words in the lexicon's bottom quartile |
//! | `syntactic_richness` | distinct (relation, head PoS, dependent PoS) triples per non-root token |
//! | `semantic_accuracy_{n,v,c,n_v}` | share of looked-up nouns / verbs / content words / nouns+verbs in the top quartile |
//! | `semantic_noise_{n,v}` | standard deviation of frequency scores of looked-up nouns / verbs |
//! | `Average Word Frequency` | mean frequency score of looked-up words |
//!
//! Concreteness uses the lexicon's own quartiles as high/low cut-offs. Words
//! missing from a lexicon are left out of every mean and ratio and counted in
//! [`Coverage`].

use std::collections::{HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexical::{mean, std_dev, CONTENT_TAGS};
use super::FeatureVector;
use crate::corpus::{Document, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LexiconKind {
    Frequency,
    Concreteness,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{kind:?} lexicon is empty")]
    EmptyLexicon { kind: LexiconKind },
    #[error("lexicon line {line}: {message}")]
    BadLine { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Surface → score table with precomputed quartile cut-offs.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconResource {
    kind: LexiconKind,
    entries: HashMap<String, f64>,
    lower_quartile: f64,
    upper_quartile: f64,
}

impl LexiconResource {
    pub fn new(kind: LexiconKind, entries: HashMap<String, f64>) -> Result<Self, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError::EmptyLexicon { kind });
        }
        if let Some((w, s)) = entries.iter().find(|(_, s)| !s.is_finite()) {
            return Err(LexiconError::BadLine { line: 0, message: format!("score {s} for `{w}` is not finite") });
        }
        let mut scores: Vec<f64> = entries.values().copied().collect();
        scores.sort_by(f64::total_cmp);
        Ok(LexiconResource {
            kind,
            lower_quartile: nearest_rank(&scores, 0.25),
            upper_quartile: nearest_rank(&scores, 0.75),
            entries,
        })
    }

    /// Reads `surface<TAB>score` lines; `#` starts a comment line.
    pub fn from_reader<R: BufRead>(kind: LexiconKind, reader: R) -> Result<Self, LexiconError> {
        let mut entries = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (surface, score) = line.split_once('\t').ok_or_else(|| LexiconError::BadLine {
                line: i + 1,
                message: "expected surface<TAB>score".into(),
            })?;
            let score: f64 = score.trim().parse().map_err(|_| LexiconError::BadLine {
                line: i + 1,
                message: format!("score `{score}` is not a number"),
            })?;
            if !score.is_finite() {
                return Err(LexiconError::BadLine { line: i + 1, message: "score is not finite".into() });
            }
            entries.insert(surface.to_string(), score);
        }
        LexiconResource::new(kind, entries)
    }

    pub fn from_path(kind: LexiconKind, path: &Path) -> Result<Self, LexiconError> {
        let file = std::fs::File::open(path)?;
        LexiconResource::from_reader(kind, std::io::BufReader::new(file))
    }

    pub fn kind(&self) -> LexiconKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn score(&self, surface: &str) -> Option<f64> {
        self.entries.get(surface).copied()
    }

    pub fn lower_quartile(&self) -> f64 {
        self.lower_quartile
    }

    pub fn upper_quartile(&self) -> f64 {
        self.upper_quartile
    }
}

fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Lexicons available to readability metrics.
#[derive(Debug, Clone, Copy)]
pub struct Lexicons<'a> {
    pub frequency: &'a LexiconResource,
    pub concreteness: &'a LexiconResource,
}

/// One readability metric: a document and the lexicons in, a scalar out.
///
/// `None` means the metric had nothing to measure (no covered tokens); the
/// extractor then records the neutral value 0.0 and a warning.
pub trait ReadabilityMetric: Send + Sync {
    fn name(&self) -> &str;
    fn compute(&self, doc: &Document, lexicons: Lexicons<'_>) -> Option<f64>;
}

/// Word classes addressed by the default metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordClassSel {
    Noun,
    Verb,
    Content,
    NounOrVerb,
    AnyWord,
}

impl WordClassSel {
    fn accepts(&self, t: &Token) -> bool {
        if t.is_punct() {
            return false;
        }
        let pos = t.pos();
        match self {
            WordClassSel::Noun => pos.starts_with('n'),
            WordClassSel::Verb => pos == "v",
            WordClassSel::Content => CONTENT_TAGS.contains(&pos),
            WordClassSel::NounOrVerb => pos.starts_with('n') || pos == "v",
            WordClassSel::AnyWord => true,
        }
    }
}

fn frequency_scores(doc: &Document, lex: &LexiconResource, class: WordClassSel) -> Vec<f64> {
    doc.tokens().filter(|t| class.accepts(t)).filter_map(|t| lex.score(t.surface())).collect()
}

fn share(scores: &[f64], pred: impl Fn(f64) -> bool) -> Option<f64> {
    if scores.is_empty() {
        None
    } else {
        Some(scores.iter().filter(|&&s| pred(s)).count() as f64 / scores.len() as f64)
    }
}

pub struct LexicalRichness;

impl ReadabilityMetric for LexicalRichness {
    fn name(&self) -> &str {
        "lexical_richness"
    }

    fn compute(&self, doc: &Document, lex: Lexicons<'_>) -> Option<f64> {
        let f = lex.frequency;
        share(&frequency_scores(doc, f, WordClassSel::AnyWord), |s| s < f.lower_quartile())
    }
}

pub struct SyntacticRichness;

impl ReadabilityMetric for SyntacticRichness {
    fn name(&self) -> &str {
        "syntactic_richness"
    }

    fn compute(&self, doc: &Document, _: Lexicons<'_>) -> Option<f64> {
        let mut triples = HashSet::new();
        let mut non_root = 0usize;
        for s in doc.sentences() {
            let toks = s.tokens();
            for t in toks.iter().filter(|t| !t.is_root()) {
                non_root += 1;
                triples.insert((t.deprel(), toks[t.head() - 1].pos(), t.pos()));
            }
        }
        // a document of bare roots has no relations to vary; score it 0
        Some(if non_root == 0 { 0.0 } else { triples.len() as f64 / non_root as f64 })
    }
}

pub struct SemanticAccuracy {
    pub name: &'static str,
    pub class: WordClassSel,
}

impl ReadabilityMetric for SemanticAccuracy {
    fn name(&self) -> &str {
        self.name
    }

    fn compute(&self, doc: &Document, lex: Lexicons<'_>) -> Option<f64> {
        let f = lex.frequency;
        share(&frequency_scores(doc, f, self.class), |s| s >= f.upper_quartile())
    }
}

pub struct SemanticNoise {
    pub name: &'static str,
    pub class: WordClassSel,
}

impl ReadabilityMetric for SemanticNoise {
    fn name(&self) -> &str {
        self.name
    }

    fn compute(&self, doc: &Document, lex: Lexicons<'_>) -> Option<f64> {
        let scores = frequency_scores(doc, lex.frequency, self.class);
        (!scores.is_empty()).then(|| std_dev(&scores))
    }
}

pub struct AverageWordFrequency;

impl ReadabilityMetric for AverageWordFrequency {
    fn name(&self) -> &str {
        "Average Word Frequency"
    }

    fn compute(&self, doc: &Document, lex: Lexicons<'_>) -> Option<f64> {
        let scores = frequency_scores(doc, lex.frequency, WordClassSel::AnyWord);
        (!scores.is_empty()).then(|| mean(&scores))
    }
}

/// The nine default metrics, in inventory order.
pub fn default_metrics() -> Vec<Box<dyn ReadabilityMetric>> {
    vec![
        Box::new(LexicalRichness),
        Box::new(SyntacticRichness),
        Box::new(SemanticAccuracy { name: "semantic_accuracy_n", class: WordClassSel::Noun }),
        Box::new(SemanticAccuracy { name: "semantic_accuracy_v", class: WordClassSel::Verb }),
        Box::new(SemanticAccuracy { name: "semantic_accuracy_c", class: WordClassSel::Content }),
        Box::new(SemanticAccuracy { name: "semantic_accuracy_n_v", class: WordClassSel::NounOrVerb }),
        Box::new(SemanticNoise { name: "semantic_noise_n", class: WordClassSel::Noun }),
        Box::new(SemanticNoise { name: "semantic_noise_v", class: WordClassSel::Verb }),
        Box::new(AverageWordFrequency),
    ]
}

/// Lexicon hit rates over word tokens of one document.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub words: usize,
    pub frequency_hits: usize,
    pub concreteness_hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReadabilityWarning {
    /// No token of the required class was found in the lexicon; the metric
    /// was set to 0.0.
    ZeroCoverage { doc_id: String, feature: String },
}

pub struct ReadabilityOutput {
    pub values: FeatureVector,
    pub coverage: Coverage,
    pub warnings: Vec<ReadabilityWarning>,
}

pub fn extract_readability(
    doc: &Document,
    metrics: &[Box<dyn ReadabilityMetric>],
    lexicons: Lexicons<'_>,
) -> ReadabilityOutput {
    let mut values = FeatureVector::new(doc.doc_id());
    let mut warnings = Vec::new();
    let mut neutral = |name: &str, v: Option<f64>| -> f64 {
        v.unwrap_or_else(|| {
            log::warn!("{}: no lexicon coverage for {name}; using 0", doc.doc_id());
            warnings.push(ReadabilityWarning::ZeroCoverage { doc_id: doc.doc_id().into(), feature: name.into() });
            0.0
        })
    };
    for m in metrics {
        let v = m.compute(doc, lexicons);
        values.push(m.name(), neutral(m.name(), v));
    }

    let conc = lexicons.concreteness;
    let scores = frequency_scores(doc, conc, WordClassSel::AnyWord);
    let covered = !scores.is_empty();
    let avg = covered.then(|| mean(&scores));
    let sd = covered.then(|| std_dev(&scores));
    let high = share(&scores, |s| s >= conc.upper_quartile());
    let low = share(&scores, |s| s <= conc.lower_quartile());
    values.push("average_concreteness", neutral("average_concreteness", avg));
    values.push("concrete_std", neutral("concrete_std", sd));
    values.push("high_ratio", neutral("high_ratio", high));
    values.push("low_ratio", neutral("low_ratio", low));

    let words = doc.tokens().filter(|t| !t.is_punct()).count();
    let coverage = Coverage {
        words,
        frequency_hits: frequency_scores(doc, lexicons.frequency, WordClassSel::AnyWord).len(),
        concreteness_hits: scores.len(),
    };
    ReadabilityOutput { values, coverage, warnings }
}
