//! General lexical measures and PoS-based ratios.

use std::collections::{HashMap, HashSet};

use super::wordclass::{punct_kind, CONJUNCTIONS, PRONOUNS, PUNCT_KINDS};
use super::{pos_ratio_name, ratio, FeatureInventory, FeatureVector};
use crate::corpus::Document;

pub const MTLD_THRESHOLD: f64 = 0.72;
pub const STTR_WINDOW: usize = 1000;

/// LTP tags counted as content words for lexical density.
pub(crate) const CONTENT_TAGS: &[&str] =
    &["a", "b", "d", "i", "j", "n", "nd", "nh", "ni", "nl", "ns", "nt", "nz", "v"];

/// Words of at least this many characters count as long.
const LONG_WORD_CHARS: usize = 3;

pub fn ttr<S: AsRef<str>>(tokens: &[S]) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    let types: HashSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    types.len() as f64 / tokens.len() as f64
}

/// Mean TTR over consecutive complete windows of `window` tokens; the
/// trailing partial window is dropped. Shorter inputs fall back to TTR.
pub fn sttr<S: AsRef<str>>(tokens: &[S], window: usize) -> f64 {
    assert!(window > 0, "STTR window must be positive");
    if tokens.len() < window {
        return ttr(tokens);
    }
    let windows: Vec<f64> = tokens.chunks_exact(window).map(ttr).collect();
    windows.iter().sum::<f64>() / windows.len() as f64
}

/// Measure of textual lexical diversity: the mean of a forward and a backward
/// pass, each scoring `tokens / factors`.
///
/// A factor closes when the running TTR falls below `threshold`; the leftover
/// segment adds `(1 - ttr) / (1 - threshold)` of a factor. A pass that closes
/// no factor and leaves no partial credit (all tokens distinct) scores the
/// token count.
pub fn mtld<S: AsRef<str>>(tokens: &[S], threshold: f64) -> f64 {
    assert!(threshold > 0.0 && threshold < 1.0, "MTLD threshold must lie in (0, 1)");
    if tokens.is_empty() {
        return 0.0;
    }
    let forward = mtld_pass(tokens.iter().map(AsRef::as_ref), tokens.len(), threshold);
    let backward = mtld_pass(tokens.iter().rev().map(AsRef::as_ref), tokens.len(), threshold);
    (forward + backward) / 2.0
}

fn mtld_pass<'a>(tokens: impl Iterator<Item = &'a str>, n: usize, threshold: f64) -> f64 {
    let mut factors = 0.0;
    let mut types: HashSet<&str> = HashSet::new();
    let mut count = 0usize;
    for t in tokens {
        types.insert(t);
        count += 1;
        let running = types.len() as f64 / count as f64;
        if running < threshold {
            factors += 1.0;
            types.clear();
            count = 0;
        }
    }
    if count > 0 {
        let running = types.len() as f64 / count as f64;
        factors += (1.0 - running) / (1.0 - threshold);
    }
    if factors > 0.0 {
        n as f64 / factors
    } else {
        n as f64
    }
}

/// Lexical layer: general measures over word (non-punctuation) tokens, PoS
/// ratios over all tokens, word-class ratios over all tokens, and punctuation
/// kind ratios over punctuation tokens.
pub fn extract_lexical(doc: &Document, inventory: &FeatureInventory) -> FeatureVector {
    let mut out = FeatureVector::new(doc.doc_id());
    let words: Vec<&str> = doc.tokens().filter(|t| !t.is_punct()).map(|t| t.surface()).collect();
    let word_lengths: Vec<f64> =
        doc.tokens().filter(|t| !t.is_punct()).map(|t| t.char_count() as f64).collect();
    let n = words.len();
    let nf = n as f64;

    let mut freq: HashMap<&str, usize> = HashMap::new();
    for w in &words {
        *freq.entry(w).or_default() += 1;
    }
    let types = freq.len() as f64;
    let hapax = freq.values().filter(|&&c| c == 1).count();
    let dis = freq.values().filter(|&&c| c == 2).count();

    out.push("TTR", ttr(&words));
    out.push("STTR", sttr(&words, STTR_WINDOW));
    out.push("AvgWordLength(char.)", mean(&word_lengths));
    out.push("MTLD", mtld(&words, MTLD_THRESHOLD));
    out.push("RootTTR", if n > 0 { types / nf.sqrt() } else { 0.0 });
    out.push("LogTTR", if n > 1 { types.ln() / nf.ln() } else { 0.0 });
    out.push("HapaxRatio", ratio(hapax, n));
    out.push("DisLegomenaRatio", ratio(dis, n));
    let content = doc.tokens().filter(|t| !t.is_punct() && CONTENT_TAGS.contains(&t.pos())).count();
    out.push("LexicalDensity", ratio(content, n));
    out.push("YuleK", yule_k(&freq, n));
    out.push("SingleCharWordRatio", ratio(word_lengths.iter().filter(|&&l| l == 1.0).count(), n));
    out.push(
        "LongWordRatio",
        ratio(word_lengths.iter().filter(|&&l| l >= LONG_WORD_CHARS as f64).count(), n),
    );
    let chars: Vec<char> = words.iter().flat_map(|w| w.chars()).collect();
    let char_types: HashSet<char> = chars.iter().copied().collect();
    out.push("CharTTR", ratio(char_types.len(), chars.len()));
    out.push("WordLengthStd", std_dev(&word_lengths));

    let total = doc.token_count();
    let mut pos_counts: HashMap<&str, usize> = HashMap::new();
    for t in doc.tokens() {
        *pos_counts.entry(t.pos()).or_default() += 1;
    }
    for tag in inventory.pos_tags() {
        out.push(pos_ratio_name(tag), ratio(pos_counts.get(tag.as_str()).copied().unwrap_or(0), total));
    }
    for class in CONJUNCTIONS.iter().chain(PRONOUNS) {
        let hits = doc.tokens().filter(|t| class.words.contains(&t.surface())).count();
        out.push(class.name, ratio(hits, total));
    }
    let puncts: Vec<_> = doc.tokens().filter(|t| t.is_punct()).map(|t| punct_kind(t.surface())).collect();
    for (kind, name) in PUNCT_KINDS {
        out.push(name, ratio(puncts.iter().filter(|&&k| k == kind).count(), puncts.len()));
    }
    out
}

fn yule_k(freq: &HashMap<&str, usize>, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut spectrum: HashMap<usize, usize> = HashMap::new();
    for &c in freq.values() {
        *spectrum.entry(c).or_default() += 1;
    }
    let s2: f64 = spectrum.iter().map(|(&m, &v)| (m * m * v) as f64).sum();
    let nf = n as f64;
    (1e4 * (s2 - nf) / (nf * nf)).max(0.0)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Population standard deviation.
pub(crate) fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ttr_basic() {
        assert_eq!(ttr(&["a", "b", "a", "b"]), 0.5);
        assert_eq!(ttr::<&str>(&[]), 0.0);
    }

    #[test]
    fn sttr_windows() {
        let toks: Vec<String> = (0..2500).map(|i| format!("w{}", i % 500)).collect();
        // two complete windows of 1000 with 500 types each; the 500-token tail is dropped
        assert_eq!(sttr(&toks, 1000), 0.5);
        assert_eq!(sttr(&["a", "a", "b"], 1000), ttr(&["a", "a", "b"]));
    }

    #[test]
    fn mtld_all_distinct_falls_back_to_length() {
        let toks: Vec<String> = (0..37).map(|i| i.to_string()).collect();
        assert_eq!(mtld(&toks, MTLD_THRESHOLD), 37.0);
    }

    #[test]
    fn mtld_is_symmetric_for_palindromes() {
        let toks = ["a", "b", "c", "b", "a"];
        let fwd = mtld_pass(toks.iter().copied(), 5, 0.72);
        let bwd = mtld_pass(toks.iter().rev().copied(), 5, 0.72);
        assert_eq!(fwd, bwd);
    }

    #[test]
    fn yule_k_of_uniform_text() {
        let mut freq = HashMap::new();
        freq.insert("a", 1);
        freq.insert("b", 1);
        assert_eq!(yule_k(&freq, 2), 0.0);
    }
}
