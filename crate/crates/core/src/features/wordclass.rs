//! Closed word classes and punctuation kinds behind the `ratio_*` features.
//!
//! Conjunction and pronoun classes match on surface form so they do not
//! depend on a particular tagger's PoS granularity.

pub(crate) struct WordClass {
    pub name: &'static str,
    pub words: &'static [&'static str],
}

pub(crate) const CONJUNCTIONS: &[WordClass] = &[
    WordClass {
        name: "ratio_advrstvConj",
        words: &["但", "但是", "然而", "可是", "不过", "却", "只是", "反而", "而是"],
    },
    WordClass {
        name: "ratio_paraConj",
        words: &["和", "与", "及", "以及", "并", "并且", "而且", "或", "或者", "跟", "同", "且"],
    },
    WordClass {
        name: "ratio_causalConj",
        words: &["因为", "由于", "所以", "因此", "因而", "既然", "故", "以致", "从而"],
    },
    WordClass {
        name: "ratio_sequnConj",
        words: &["然后", "接着", "随后", "之后", "于是", "首先", "其次", "最后", "后来"],
    },
    WordClass {
        name: "ratio_condConj",
        words: &["如果", "假如", "要是", "只要", "只有", "除非", "一旦", "若", "倘若"],
    },
    WordClass {
        name: "ratio_concessConj",
        words: &["虽然", "尽管", "即使", "哪怕", "固然", "虽", "即便"],
    },
];

pub(crate) const PRONOUNS: &[WordClass] = &[
    WordClass { name: "ratio_1stPron_singular", words: &["我", "俺", "本人"] },
    WordClass { name: "ratio_1stPron_plural", words: &["我们", "咱们", "咱"] },
    WordClass { name: "ratio_2ndPron_singular", words: &["你", "您"] },
    WordClass { name: "ratio_2ndPron_plural", words: &["你们"] },
    WordClass { name: "ratio_3rdPron_singular", words: &["他", "她", "它"] },
    WordClass { name: "ratio_3rdPron_plural", words: &["他们", "她们", "它们"] },
    WordClass { name: "ratio_thisPron_singular", words: &["这", "这个", "此", "该"] },
    WordClass { name: "ratio_thisPron_plural", words: &["这些"] },
    WordClass { name: "ratio_thatPron_singular", words: &["那", "那个"] },
    WordClass { name: "ratio_thatPron_plural", words: &["那些"] },
    WordClass {
        name: "ratio_interrogPron",
        words: &["什么", "谁", "哪", "哪里", "哪儿", "怎么", "怎样", "为什么", "多少"],
    },
];

/// Punctuation kinds; every punctuation token falls in exactly one, so the
/// kind ratios of a document with punctuation sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PunctKind {
    Period,
    Comma,
    EnumComma,
    Semicolon,
    Colon,
    Question,
    Exclamation,
    Quote,
    Bracket,
    Dash,
    Ellipsis,
    Special,
}

pub(crate) const PUNCT_KINDS: [(PunctKind, &str); 12] = [
    (PunctKind::Period, "ratio_period"),
    (PunctKind::Comma, "ratio_comma"),
    (PunctKind::EnumComma, "ratio_enumComma"),
    (PunctKind::Semicolon, "ratio_semicolon"),
    (PunctKind::Colon, "ratio_colon"),
    (PunctKind::Question, "ratio_question"),
    (PunctKind::Exclamation, "ratio_exclamation"),
    (PunctKind::Quote, "ratio_quote"),
    (PunctKind::Bracket, "ratio_bracket"),
    (PunctKind::Dash, "ratio_dash"),
    (PunctKind::Ellipsis, "ratio_ellipsis"),
    (PunctKind::Special, "ratio_spmark"),
];

pub(crate) fn punct_kind(surface: &str) -> PunctKind {
    match surface {
        "。" | "．" | "." | "｡" => PunctKind::Period,
        "，" | "," => PunctKind::Comma,
        "、" => PunctKind::EnumComma,
        "；" | ";" => PunctKind::Semicolon,
        "：" | ":" => PunctKind::Colon,
        "？" | "?" => PunctKind::Question,
        "！" | "!" => PunctKind::Exclamation,
        "(" | ")" | "（" | "）" => PunctKind::Bracket,
        s if s.chars().all(|c| matches!(c, '“' | '”' | '‘' | '’' | '「' | '」' | '『' | '』' | '"' | '\'' | '＂' | '＇')) => {
            PunctKind::Quote
        }
        s if s.chars().all(|c| matches!(c, '—' | '–' | '―' | '-' | '－')) => PunctKind::Dash,
        s if s.chars().all(|c| matches!(c, '…' | '⋯' | '.')) => PunctKind::Ellipsis,
        _ => PunctKind::Special,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punct_kinds() {
        assert_eq!(punct_kind("（"), PunctKind::Bracket);
        assert_eq!(punct_kind(")"), PunctKind::Bracket);
        assert_eq!(punct_kind("【"), PunctKind::Special);
        assert_eq!(punct_kind("“"), PunctKind::Quote);
        assert_eq!(punct_kind("——"), PunctKind::Dash);
        assert_eq!(punct_kind("……"), PunctKind::Ellipsis);
        assert_eq!(punct_kind("..."), PunctKind::Ellipsis);
        assert_eq!(punct_kind("《"), PunctKind::Special);
        assert_eq!(punct_kind("、"), PunctKind::EnumComma);
    }

    #[test]
    fn class_names_are_unique() {
        let mut names: Vec<&str> = CONJUNCTIONS
            .iter()
            .chain(PRONOUNS)
            .map(|c| c.name)
            .chain(PUNCT_KINDS.iter().map(|(_, n)| *n))
            .collect();
        assert_eq!(names.len(), 29);
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 29);
    }
}
