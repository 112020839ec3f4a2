use std::collections::HashMap;

use super::lexical::{mean, std_dev};
use super::wordclass::{punct_kind, PunctKind};
use super::{dep_ratio_name, ratio, FeatureInventory, FeatureVector};
use crate::corpus::{Document, Sentence, Terminator};

/// Syntactical layer. Sentence-length measures count all tokens; dependency
/// measures pool every non-root token of the document, where every head-0
/// token is a root.
pub fn extract_syntactical(doc: &Document, inventory: &FeatureInventory) -> FeatureVector {
    let mut out = FeatureVector::new(doc.doc_id());
    let sentences = doc.sentences();
    let n_sent = sentences.len();
    let lengths: Vec<f64> = sentences.iter().map(|s| s.len() as f64).collect();
    let chars: usize = doc.tokens().map(|t| t.char_count()).sum();
    let total = doc.token_count();

    let mut distance_sum = 0usize;
    let mut non_root = 0usize;
    let mut leftward = 0usize;
    let mut adjacent = 0usize;
    for s in sentences {
        for (i, t) in s.tokens().iter().enumerate() {
            if t.is_root() {
                continue;
            }
            let idx = i + 1;
            let d = idx.abs_diff(t.head());
            non_root += 1;
            distance_sum += d;
            if t.head() > idx {
                leftward += 1;
            }
            if d == 1 {
                adjacent += 1;
            }
        }
    }
    let terminated = |kind: Terminator| sentences.iter().filter(|s| s.terminator() == kind).count();
    let depths: Vec<f64> = sentences.iter().map(|s| tree_depth(s) as f64).collect();
    let clauses: Vec<f64> = sentences
        .iter()
        .map(|s| {
            1.0 + s
                .tokens()
                .iter()
                .filter(|t| {
                    t.is_punct()
                        && matches!(punct_kind(t.surface()), PunctKind::Comma | PunctKind::Semicolon | PunctKind::Colon)
                })
                .count() as f64
        })
        .collect();

    out.push("Words per sentence", mean(&lengths));
    out.push("Characters per sentence", chars as f64 / n_sent as f64);
    out.push("QuestionRatio", ratio(terminated(Terminator::Question), n_sent));
    out.push("ExclamationRatio", ratio(terminated(Terminator::Exclaim), n_sent));
    out.push("Mean Dependency Distance", if non_root > 0 { distance_sum as f64 / non_root as f64 } else { 0.0 });
    // each non-root token is exactly one child of its head
    out.push("Average Number of Children per Node", ratio(non_root, total));
    out.push("SentLengthStd", std_dev(&lengths));
    out.push("MeanTreeDepth", mean(&depths));
    out.push("EllipsisRatio", ratio(terminated(Terminator::Ellipsis), n_sent));
    out.push("ClausesPerSentence", mean(&clauses));

    let mut rel_counts: HashMap<&str, usize> = HashMap::new();
    for t in doc.tokens() {
        *rel_counts.entry(t.deprel()).or_default() += 1;
    }
    for rel in inventory.dep_relations() {
        out.push(dep_ratio_name(rel), ratio(rel_counts.get(rel.as_str()).copied().unwrap_or(0), total));
    }
    out.push("ratio_dep_leftward", ratio(leftward, non_root));
    out.push("ratio_dep_adjacent", ratio(adjacent, non_root));
    out
}

/// Height of the dependency forest in tokens (a lone root has depth 1).
/// Head cycles, which only noisy input produces, are cut at sentence length.
pub(crate) fn tree_depth(s: &Sentence) -> usize {
    let tokens = s.tokens();
    let n = tokens.len();
    let mut depth = vec![0usize; n];
    for start in 0..n {
        if depth[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        let base = loop {
            if depth[cur] != 0 {
                break depth[cur];
            }
            if path.len() > n {
                break n;
            }
            path.push(cur);
            let h = tokens[cur].head();
            if h == 0 {
                break 0;
            }
            cur = h - 1;
        };
        for (k, &node) in path.iter().rev().enumerate() {
            depth[node] = (base + k + 1).min(n);
        }
    }
    depth.into_iter().max().unwrap_or(0)
}
