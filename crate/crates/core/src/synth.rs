//! Synthetic tagged corpora with planted group differences, used by the
//! end-to-end tests and the `synth` command.
//!
//! Three groups are generated. Group A (labelled OCN) writes longer
//! sentences in characters (more words per sentence and longer words) and
//! uses adversative conjunctions at twice the rate of the others, without
//! changing its overall conjunction rate. Group B (NMT engines) and group C
//! (LLM engines) overlap: B brackets words more often and C picks words from
//! a flatter frequency curve, both weak effects.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::classify::derive_seed;
use crate::corpus::{Corpus, CorpusError, Document, GroupLabel, Origin, Sentence, Tagset, Token};
use crate::features::{LexiconError, LexiconKind, LexiconResource};
use crate::features::wordclass::{CONJUNCTIONS, PRONOUNS};
use crate::grouping::{EngineRegistry, DEFAULT_ENGINES};

/// Features the generator shifts for group A.
pub const PLANTED_FEATURES: [&str; 2] = ["Characters per sentence", "ratio_advrstvConj"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub docs_per_group: usize,
    pub sentences_per_doc: usize,
    pub reference_docs: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { docs_per_group: 60, sentences_per_doc: 60, reference_docs: 40, seed: 7 }
    }
}

pub struct SynthBundle {
    pub corpus: Corpus,
    /// Unlabelled-style reference corpus (stored as OCN) for the N-PoS profile.
    pub reference: Corpus,
    /// TSV bodies of the two lexicons (`word<TAB>score`).
    pub frequency_tsv: String,
    pub concreteness_tsv: String,
}

impl SynthBundle {
    pub fn frequency(&self) -> Result<LexiconResource, LexiconError> {
        LexiconResource::from_reader(LexiconKind::Frequency, self.frequency_tsv.as_bytes())
    }

    pub fn concreteness(&self) -> Result<LexiconResource, LexiconError> {
        LexiconResource::from_reader(LexiconKind::Concreteness, self.concreteness_tsv.as_bytes())
    }
}

/// Per-group generation parameters.
#[derive(Debug, Clone, Copy)]
struct Style {
    /// Mean words per sentence (document means vary around it).
    words: f64,
    /// Position between the short and long word-length profiles.
    word_len: f64,
    adversative: f64,
    /// Zipf exponent of word choice within a tag and length.
    zipf: f64,
    /// Probability that a sentence contains a bracketed word.
    brackets: f64,
}

const SHORT_LEN: [f64; 4] = [0.45, 0.40, 0.10, 0.05];
const LONG_LEN: [f64; 4] = [0.05, 0.35, 0.36, 0.24];
const CONJ_RATE: f64 = 0.045;
const DOC_SHIFT_SD: f64 = 0.05;
const WORDS_SD: f64 = 0.03;
const WORD_LEN_SD: f64 = 0.02;

const STYLE_B: Style = Style { words: 18.0, word_len: 0.385, adversative: 0.015, zipf: 1.0, brackets: 0.04 };
const STYLE_A: Style = Style { words: 18.0 * 1.14, word_len: 0.675, adversative: 0.030, brackets: 0.03, ..STYLE_B };
const STYLE_C: Style = Style { zipf: 0.97, brackets: 0.03, ..STYLE_B };

const OPEN_TAGS: [(&str, f64); 12] = [
    ("n", 0.28),
    ("v", 0.22),
    ("a", 0.06),
    ("d", 0.08),
    ("m", 0.04),
    ("q", 0.03),
    ("nh", 0.02),
    ("ns", 0.02),
    ("ni", 0.01),
    ("nz", 0.01),
    ("i", 0.01),
    ("b", 0.01),
];
const CLOSED: [(&str, f64, &[&str]); 4] = [
    ("p", 0.05, &["在", "对", "从", "把", "被", "向"]),
    ("u", 0.08, &["的", "了", "着", "过", "地", "得"]),
    ("r", 0.04, &["我们", "他", "他们", "这", "这些", "自己", "它"]),
    ("ws", 0.005, &["GDP", "WTO", "NASA", "CEO", "AI"]),
];
const GENERIC_CONJ: [&str; 5] = ["而", "以便", "以免", "无论", "不但"];
const ADVERSATIVE: [&str; 5] = ["但", "但是", "然而", "可是", "不过"];

struct Vocab {
    /// tag → word length (1..=4) → words, most frequent first.
    open: HashMap<&'static str, Vec<Vec<String>>>,
}

fn reserved_words() -> HashSet<&'static str> {
    CONJUNCTIONS.iter().chain(PRONOUNS).flat_map(|c| c.words.iter().copied()).collect()
}

fn build_vocab(rng: &mut ChaCha8Rng) -> Vocab {
    let reserved = reserved_words();
    let mut seen: HashSet<String> = HashSet::new();
    let mut open = HashMap::new();
    for &(tag, _) in &OPEN_TAGS {
        let mut by_len = Vec::new();
        for len in 1..=4 {
            let want = if len == 1 { 40 } else { 120 };
            let mut words = Vec::new();
            while words.len() < want {
                let w: String =
                    (0..len).map(|_| char::from_u32(rng.gen_range(0x4E00..0x9FA5)).unwrap()).collect();
                if reserved.contains(w.as_str()) || !seen.insert(w.clone()) {
                    continue;
                }
                words.push(w);
            }
            by_len.push(words);
        }
        open.insert(tag, by_len);
    }
    Vocab { open }
}

fn deprel_for(tag: &str, rng: &mut ChaCha8Rng) -> &'static str {
    let options: &[&str] = match tag {
        "n" | "nh" | "ns" | "ni" | "nz" | "r" | "ws" => &["SBV", "VOB", "ATT", "POB"],
        "v" => &["COO", "VOB", "ATT"],
        "a" | "b" | "m" | "q" | "i" => &["ATT", "ADV", "CMP"],
        "d" | "p" => &["ADV"],
        "u" => &["RAD"],
        "c" => &["LAD"],
        _ => &["ATT"],
    };
    options[rng.gen_range(0..options.len())]
}

struct DocStyle {
    words: f64,
    len_dist: WeightedIndex<f64>,
    adversative: f64,
    brackets: f64,
    picks: HashMap<&'static str, Vec<WeightedIndex<f64>>>,
}

fn mean_len(probs: &[f64]) -> f64 {
    probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
}

/// Document-level variation moves words per sentence and word length in
/// opposite directions, so characters per sentence varies much less than
/// either factor alone.
fn doc_style(style: Style, vocab: &Vocab, rng: &mut ChaCha8Rng) -> DocStyle {
    let unit = Normal::new(0.0, 1.0).unwrap();
    let z = unit.sample(rng);
    let words = style.words * (DOC_SHIFT_SD * z + WORDS_SD * unit.sample(rng)).exp();
    let short = mean_len(&SHORT_LEN);
    let long = mean_len(&LONG_LEN);
    let base = short + style.word_len * (long - short);
    let target = base * (-DOC_SHIFT_SD * z + WORD_LEN_SD * unit.sample(rng)).exp();
    let t = ((target - short) / (long - short)).clamp(0.0, 1.0);
    let probs: Vec<f64> = SHORT_LEN.iter().zip(&LONG_LEN).map(|(s, l)| (1.0 - t) * s + t * l).collect();
    let picks = vocab
        .open
        .iter()
        .map(|(&tag, by_len)| {
            let w = by_len
                .iter()
                .map(|words| WeightedIndex::new((0..words.len()).map(|r| (r as f64 + 1.0).powf(-style.zipf))).unwrap())
                .collect();
            (tag, w)
        })
        .collect();
    DocStyle {
        words,
        len_dist: WeightedIndex::new(probs).unwrap(),
        adversative: style.adversative,
        brackets: style.brackets,
        picks,
    }
}

fn sentence(vocab: &Vocab, ds: &DocStyle, rng: &mut ChaCha8Rng) -> Result<Sentence, CorpusError> {
    let tag_dist = WeightedIndex::new(OPEN_TAGS.iter().map(|t| t.1).chain(CLOSED.iter().map(|c| c.1))).unwrap();
    let n_words = ((ds.words * rng.gen_range(0.7..1.3)).round() as usize).max(3);
    // (surface, tag)
    let mut words: Vec<(String, &'static str)> = Vec::with_capacity(n_words + 4);
    for i in 0..n_words {
        if rng.gen::<f64>() < CONJ_RATE {
            let surface = if rng.gen::<f64>() < ds.adversative / CONJ_RATE {
                ADVERSATIVE[rng.gen_range(0..ADVERSATIVE.len())]
            } else {
                GENERIC_CONJ[rng.gen_range(0..GENERIC_CONJ.len())]
            };
            words.push((surface.to_string(), "c"));
        } else {
            let k = tag_dist.sample(rng);
            if k < OPEN_TAGS.len() {
                let tag = OPEN_TAGS[k].0;
                let len = ds.len_dist.sample(rng);
                let idx = ds.picks[tag][len].sample(rng);
                words.push((vocab.open[tag][len][idx].clone(), tag));
            } else {
                let (tag, _, list) = CLOSED[k - OPEN_TAGS.len()];
                words.push((list[rng.gen_range(0..list.len())].to_string(), tag));
            }
        }
        if i + 1 < n_words && i > 0 && rng.gen::<f64>() < 0.08 {
            words.push(("，".into(), "wp"));
        }
    }
    if n_words > 2 && rng.gen::<f64>() < ds.brackets {
        // wrap one non-punctuation word in full-width brackets
        let candidates: Vec<usize> = (1..words.len()).filter(|&i| words[i].1 != "wp").collect();
        if let Some(&k) = candidates.get(rng.gen_range(0..candidates.len().max(1))) {
            words.insert(k + 1, ("）".into(), "wp"));
            words.insert(k, ("（".into(), "wp"));
        }
    }
    let end = match rng.gen_range(0..100) {
        0..=2 => "？",
        3..=4 => "！",
        _ => "。",
    };
    words.push((end.into(), "wp"));

    let root = words.iter().position(|w| w.1 == "v").unwrap_or(0);
    let tokens = words
        .iter()
        .enumerate()
        .map(|(i, (surface, tag))| {
            let (head, rel) = if i == root {
                (0, "HED")
            } else if *tag == "wp" {
                (root + 1, "WP")
            } else {
                let near = if i < root { i + 2 } else { i };
                let head = if rng.gen::<f64>() < 0.7 { near } else { root + 1 };
                (head, deprel_for(tag, rng))
            };
            Token::new(surface.clone(), *tag, head, rel)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Sentence::new(tokens)
}

fn document(
    id: String,
    label: GroupLabel,
    style: Style,
    sentences: usize,
    vocab: &Vocab,
    seed: u64,
) -> Result<Document, CorpusError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ds = doc_style(style, vocab, &mut rng);
    let s = (0..sentences).map(|_| sentence(vocab, &ds, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    Document::new(id, label, s)
}

fn lexicons(vocab: &Vocab, rng: &mut ChaCha8Rng) -> (String, String) {
    let mut freq = String::new();
    let mut conc = String::new();
    for &(tag, _) in &OPEN_TAGS {
        for words in &vocab.open[tag] {
            for (rank, w) in words.iter().enumerate() {
                let f = 1.0e5 / (rank + 1) as f64;
                writeln!(freq, "{w}\t{f}").unwrap();
                if matches!(tag, "n" | "v" | "a") && rank % 4 != 3 {
                    let c: f64 = rng.gen_range(1.0..5.0);
                    writeln!(conc, "{w}\t{:.3}", c).unwrap();
                }
            }
        }
    }
    for (_, _, list) in CLOSED {
        for w in list {
            writeln!(freq, "{w}\t1000000").unwrap();
        }
    }
    for w in GENERIC_CONJ.iter().chain(&ADVERSATIVE) {
        writeln!(freq, "{w}\t500000").unwrap();
    }
    (freq, conc)
}

/// Generates the planted three-group corpus, a reference corpus and lexicons.
pub fn planted_corpus(cfg: &SynthConfig) -> Result<SynthBundle, CorpusError> {
    let tagset = Tagset::ltp();
    let registry = EngineRegistry::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = build_vocab(&mut rng);
    let (frequency_tsv, concreteness_tsv) = lexicons(&vocab, &mut rng);

    let nmt: Vec<&str> = DEFAULT_ENGINES.iter().filter(|e| e.1 == Origin::NMT).map(|e| e.0).collect();
    let llm: Vec<&str> = DEFAULT_ENGINES.iter().filter(|e| e.1 == Origin::LLM).map(|e| e.0).collect();
    let label = |origin: Origin, engine: &str| {
        registry.label(origin, engine).map_err(|e| CorpusError::InvalidLabel(e.to_string()))
    };
    let mut docs = Vec::new();
    let mut stream = 0u64;
    let mut next_seed = || {
        stream += 1;
        derive_seed(cfg.seed, stream)
    };
    for i in 0..cfg.docs_per_group {
        let id = format!("A-{i:04}");
        docs.push(document(id, label(Origin::OCN, "")?, STYLE_A, cfg.sentences_per_doc, &vocab, next_seed())?);
    }
    for i in 0..cfg.docs_per_group {
        let engine = nmt[i % nmt.len()];
        let id = format!("B-{engine}-{i:04}");
        docs.push(document(id, label(Origin::NMT, engine)?, STYLE_B, cfg.sentences_per_doc, &vocab, next_seed())?);
    }
    for i in 0..cfg.docs_per_group {
        let engine = llm[i % llm.len()];
        let id = format!("C-{engine}-{i:04}");
        docs.push(document(id, label(Origin::LLM, engine)?, STYLE_C, cfg.sentences_per_doc, &vocab, next_seed())?);
    }
    let corpus = Corpus::with_tagset(docs, &tagset)?;
    let mut refs = Vec::new();
    for i in 0..cfg.reference_docs {
        let id = format!("R-{i:04}");
        refs.push(document(id, label(Origin::OCN, "")?, STYLE_B, cfg.sentences_per_doc, &vocab, next_seed())?);
    }
    let reference = Corpus::with_tagset(refs, &tagset)?;
    Ok(SynthBundle { corpus, reference, frequency_tsv, concreteness_tsv })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generates_valid_corpus() {
        let cfg = SynthConfig { docs_per_group: 4, sentences_per_doc: 5, reference_docs: 2, seed: 1 };
        let b = planted_corpus(&cfg).unwrap();
        assert_eq!(b.corpus.len(), 12);
        assert_eq!(b.reference.len(), 2);
        for d in b.corpus.documents() {
            for s in d.sentences() {
                assert_eq!(s.root_count(), 1);
            }
        }
        assert!(b.frequency().is_ok());
        assert!(b.concreteness().is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = SynthConfig { docs_per_group: 3, sentences_per_doc: 4, reference_docs: 1, seed: 9 };
        let a = planted_corpus(&cfg).unwrap();
        let b = planted_corpus(&cfg).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.frequency_tsv, b.frequency_tsv);
    }
}
