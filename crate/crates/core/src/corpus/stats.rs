use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{Corpus, Origin};

/// Row key of the corpus overview table: one row per (origin, engine), plus
/// aggregate rows per translated origin and for all translations together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StatsKey {
    Engine { origin: Origin, engine: String },
    OriginTotal(Origin),
    AllTranslations,
}

impl StatsKey {
    pub fn label(&self) -> String {
        match self {
            StatsKey::Engine { origin, engine } if engine.is_empty() => origin.to_string(),
            StatsKey::Engine { engine, .. } => engine.clone(),
            StatsKey::OriginTotal(o) => format!("{o}s"),
            StatsKey::AllTranslations => "MTs".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GroupStats {
    pub texts: usize,
    pub tokens: usize,
    pub types: usize,
}

#[derive(Default)]
struct Acc<'a> {
    texts: usize,
    tokens: usize,
    types: HashSet<&'a str>,
}

impl Acc<'_> {
    fn finish(self) -> GroupStats {
        GroupStats { texts: self.texts, tokens: self.tokens, types: self.types.len() }
    }
}

/// Texts, tokens and distinct surface forms per group.
///
/// Aggregate rows count types over the union of their members' vocabularies,
/// so they are not sums of the engine rows.
pub fn corpus_stats(corpus: &Corpus) -> BTreeMap<StatsKey, GroupStats> {
    let mut acc: BTreeMap<StatsKey, Acc<'_>> = BTreeMap::new();
    for doc in corpus.documents() {
        let g = doc.group();
        let mut keys = vec![StatsKey::Engine { origin: g.origin(), engine: g.engine().to_string() }];
        if !g.origin().is_original() {
            keys.push(StatsKey::OriginTotal(g.origin()));
            keys.push(StatsKey::AllTranslations);
        }
        for key in keys {
            let a = acc.entry(key).or_default();
            a.texts += 1;
            for t in doc.tokens() {
                a.tokens += 1;
                a.types.insert(t.surface());
            }
        }
    }
    acc.into_iter().map(|(k, a)| (k, a.finish())).collect()
}

/// `1685526` → `1,685,526`.
pub fn format_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, GroupLabel, LlmKind, Sentence, Token, VendorRegion};

    fn doc(id: &str, label: GroupLabel, words: &[&str]) -> Document {
        let tokens = words
            .iter()
            .enumerate()
            .map(|(i, w)| Token::new(*w, "n", if i == 0 { 0 } else { 1 }, "ATT").unwrap())
            .collect();
        Document::new(id, label, vec![Sentence::new(tokens).unwrap()]).unwrap()
    }

    #[test]
    fn counts_tokens_and_types() {
        let ocn = GroupLabel::original(Origin::OCN).unwrap();
        let c = Corpus::new(vec![doc("d", ocn, &["a", "b", "a"])], "t").unwrap();
        let stats = corpus_stats(&c);
        let row = &stats[&StatsKey::Engine { origin: Origin::OCN, engine: String::new() }];
        assert_eq!(*row, GroupStats { texts: 1, tokens: 3, types: 2 });
    }

    #[test]
    fn types_union_across_documents() {
        let ngt = GroupLabel::new(Origin::NMT, "NGT", VendorRegion::Foreign, LlmKind::NA).unwrap();
        let ndl = GroupLabel::new(Origin::NMT, "NDL", VendorRegion::Foreign, LlmKind::NA).unwrap();
        let c = Corpus::new(
            vec![doc("d1", ngt, &["a", "b"]), doc("d2", ndl, &["c", "d", "e"])],
            "t",
        )
        .unwrap();
        let stats = corpus_stats(&c);
        assert_eq!(stats[&StatsKey::OriginTotal(Origin::NMT)].types, 5);
        assert_eq!(stats[&StatsKey::AllTranslations], GroupStats { texts: 2, tokens: 5, types: 5 });
        assert_eq!(StatsKey::OriginTotal(Origin::NMT).label(), "NMTs");
    }

    #[test]
    fn thousands_separator() {
        assert_eq!(format_thousands(0), "0");
        assert_eq!(format_thousands(999), "999");
        assert_eq!(format_thousands(2000), "2,000");
        assert_eq!(format_thousands(1_685_526), "1,685,526");
    }
}
