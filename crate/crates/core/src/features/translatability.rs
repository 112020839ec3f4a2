use super::{ratio, FeatureVector};
use crate::corpus::{char_class, CharClass, Document, Script, Sentence, Token};

/// A run of Latin-script tokens longer than this many words marks a sentence
/// as carrying untranslated English.
pub const UNTRANSLATED_RUN_WORDS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TranslatabilityOutput {
    pub values: FeatureVector,
    /// Set when the document has no Han characters and foreignness fell back
    /// to the raw Latin character count.
    pub no_han: bool,
}

pub fn extract_translatability(doc: &Document) -> TranslatabilityOutput {
    let mut values = FeatureVector::new(doc.doc_id());
    let sentences = doc.sentences();
    let n_sent = sentences.len();

    let incomplete = sentences.iter().filter(|s| longest_latin_run(s) > UNTRANSLATED_RUN_WORDS).count();
    let (mut latin_chars, mut han_chars) = (0usize, 0usize);
    for t in doc.tokens() {
        for c in t.surface().chars() {
            match char_class(c) {
                CharClass::Latin => latin_chars += 1,
                CharClass::Han => han_chars += 1,
                _ => {}
            }
        }
    }
    let no_han = han_chars == 0;
    let foreignness = latin_chars as f64 / han_chars.max(1) as f64;
    let switching = sentences
        .iter()
        .filter(|s| {
            let toks = s.tokens();
            toks.iter().any(|t| t.script() == Script::Han) && toks.iter().any(|t| t.script() == Script::Latin)
        })
        .count();
    let total = doc.token_count();
    let abbreviations = doc.tokens().filter(|t| is_abbreviation(t)).count();
    let words = doc.tokens().filter(|t| !t.is_punct()).count();
    let latin_tokens = doc.tokens().filter(|t| t.script() == Script::Latin).count();

    values.push("completeness", 1.0 - ratio(incomplete, n_sent));
    values.push("foreignness", foreignness);
    values.push("code_switching", ratio(switching, n_sent));
    values.push("abbreviation", ratio(abbreviations, total));
    values.push("untranslated", ratio(latin_tokens, words));
    if no_han && latin_chars > 0 {
        log::warn!("{}: no Han characters; foreignness is the raw Latin character count", doc.doc_id());
    }
    TranslatabilityOutput { values, no_han }
}

/// Longest stretch of consecutive Latin-script tokens in a sentence.
pub(crate) fn longest_latin_run(s: &Sentence) -> usize {
    let mut best = 0;
    let mut run = 0;
    for t in s.tokens() {
        if t.script() == Script::Latin {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

fn is_abbreviation(t: &Token) -> bool {
    t.script() == Script::Latin
        && (2..=6).contains(&t.char_count())
        && t.surface().chars().all(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abbreviation_shapes() {
        let t = |s: &str| Token::new(s, "nz", 0, "HED").unwrap();
        assert!(is_abbreviation(&t("GDP")));
        assert!(is_abbreviation(&t("WTO")));
        assert!(!is_abbreviation(&t("A")));
        assert!(!is_abbreviation(&t("ABCDEFG")));
        assert!(!is_abbreviation(&t("Gdp")));
        assert!(!is_abbreviation(&t("5G")));
    }
}
