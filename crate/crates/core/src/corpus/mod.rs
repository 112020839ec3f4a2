//! Tagged-corpus data model, validation, and the canonical column format.

mod format;
mod script;
mod stats;
mod tagset;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use format::{parse_corpus, serialize_corpus, ParseWarning, ParsedCorpus};
pub use script::{script_classify, Script};
pub(crate) use script::{char_class, CharClass};
pub use stats::{corpus_stats, format_thousands, GroupStats, StatsKey};
pub use tagset::{Tagset, LTP_DEP, LTP_POS};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed line: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}, column {column}: unknown {kind} tag `{tag}`")]
    UnknownTag { line: usize, column: usize, kind: &'static str, tag: String },
    #[error("line {line}: head {head} out of range for a sentence of {sentence_len} tokens")]
    DanglingHead { line: usize, head: usize, sentence_len: usize },
    #[error("duplicate doc_id `{doc_id}`{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DuplicateDocId { doc_id: String, line: Option<usize> },
    #[error("token {index}: head {head} invalid for a sentence of {sentence_len} tokens")]
    InvalidHead { index: usize, head: usize, sentence_len: usize },
    #[error("invalid group label: {0}")]
    InvalidLabel(String),
    #[error("document `{0}` has no sentences")]
    EmptyDocument(String),
    #[error("document id is empty, padded, or contains a TAB or line break")]
    EmptyDocId,
    #[error("sentence has no tokens")]
    EmptySentence,
    #[error("token surface is empty")]
    EmptySurface,
    #[error("token surface {0:?} contains a TAB or line break")]
    InvalidSurface(String),
    #[error("tagset declaration: {0}")]
    Tagset(String),
    #[error("tagset mismatch: expected `{expected}`, found `{found}`")]
    TagsetMismatch { expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One segmented, tagged and parsed word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    surface: String,
    char_count: usize,
    pos: String,
    head: usize,
    deprel: String,
    script: Script,
}

impl Token {
    /// Builds a token; `head` is 0 for a root, otherwise the 1-based index of
    /// the governing token (checked when the token joins a [`Sentence`]).
    pub fn new(
        surface: impl Into<String>,
        pos: impl Into<String>,
        head: usize,
        deprel: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let surface = surface.into();
        if surface.contains(['\t', '\n', '\r']) {
            return Err(CorpusError::InvalidSurface(surface));
        }
        let script = script_classify(&surface)?;
        Ok(Token {
            char_count: surface.chars().count(),
            surface,
            pos: pos.into(),
            head,
            deprel: deprel.into(),
            script,
        })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    /// Unicode scalar value count of the surface.
    pub fn char_count(&self) -> usize {
        self.char_count
    }

    pub fn pos(&self) -> &str {
        &self.pos
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn deprel(&self) -> &str {
        &self.deprel
    }

    pub fn script(&self) -> Script {
        self.script
    }

    pub fn is_punct(&self) -> bool {
        self.script == Script::Punct
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminator {
    Period,
    Question,
    Exclaim,
    Ellipsis,
    Other,
}

const CLOSERS: &[&str] = &["”", "’", "」", "』", "）", ")", "》", "〉", "】", "]", "\"", "'"];

impl Terminator {
    fn of_surface(surface: &str) -> Self {
        match surface {
            "。" | "．" | "." | "｡" => Terminator::Period,
            "？" | "?" => Terminator::Question,
            "！" | "!" => Terminator::Exclaim,
            s if !s.is_empty() && s.chars().all(|c| matches!(c, '…' | '⋯' | '.')) => {
                Terminator::Ellipsis
            }
            s if s.chars().all(|c| matches!(c, '？' | '?' | '！' | '!')) => {
                // "?!" and friends count as questions
                if s.contains(['？', '?']) {
                    Terminator::Question
                } else {
                    Terminator::Exclaim
                }
            }
            _ => Terminator::Other,
        }
    }
}

/// An ordered, non-empty run of tokens with its dependency tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    tokens: Vec<Token>,
    terminator: Terminator,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::EmptySentence);
        }
        let len = tokens.len();
        for (i, t) in tokens.iter().enumerate() {
            if t.head > len || t.head == i + 1 {
                return Err(CorpusError::InvalidHead { index: i + 1, head: t.head, sentence_len: len });
            }
        }
        let terminator = derive_terminator(&tokens);
        Ok(Sentence { tokens, terminator })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn terminator(&self) -> Terminator {
        self.terminator
    }

    /// Number of tokens with head 0. A well-formed tree has exactly one.
    pub fn root_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_root()).count()
    }
}

// The last punctuation token decides, looking through trailing closing quotes
// and brackets.
fn derive_terminator(tokens: &[Token]) -> Terminator {
    tokens
        .iter()
        .rev()
        .filter(|t| t.is_punct())
        .find(|t| !CLOSERS.contains(&t.surface()))
        .map(|t| Terminator::of_surface(t.surface()))
        .unwrap_or(Terminator::Other)
}

macro_rules! text_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $name {
            pub fn as_str(&self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = CorpusError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(CorpusError::InvalidLabel(format!(
                        "unknown {} `{other}`", stringify!($name)
                    ))),
                }
            }
        }
    };
}

/// Origin class of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    /// Original Chinese.
    OCN,
    /// Neural machine translation output.
    NMT,
    /// Large-language-model translation output.
    LLM,
    /// Original English source text.
    OEN,
}

text_enum!(Origin { OCN => "OCN", NMT => "NMT", LLM => "LLM", OEN => "OEN" });

impl Origin {
    pub fn is_original(&self) -> bool {
        matches!(self, Origin::OCN | Origin::OEN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VendorRegion {
    China,
    Foreign,
    NA,
}

text_enum!(VendorRegion { China => "China", Foreign => "Foreign", NA => "NA" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LlmKind {
    TranslationSpecific,
    Generic,
    NA,
}

text_enum!(LlmKind {
    TranslationSpecific => "TranslationSpecific",
    Generic => "Generic",
    NA => "NA",
});

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupLabel {
    origin: Origin,
    engine: String,
    vendor_region: VendorRegion,
    llm_kind: LlmKind,
}

impl GroupLabel {
    pub fn new(
        origin: Origin,
        engine: impl Into<String>,
        vendor_region: VendorRegion,
        llm_kind: LlmKind,
    ) -> Result<Self, CorpusError> {
        let engine = engine.into();
        if engine.is_empty() != origin.is_original() {
            return Err(CorpusError::InvalidLabel(format!(
                "engine must be empty exactly for original texts (origin {origin}, engine `{engine}`)"
            )));
        }
        if engine.chars().any(char::is_whitespace) {
            return Err(CorpusError::InvalidLabel(format!("engine `{engine}` contains whitespace")));
        }
        if llm_kind != LlmKind::NA && origin != Origin::LLM {
            return Err(CorpusError::InvalidLabel(format!(
                "llm_kind {llm_kind} is only valid for LLM documents"
            )));
        }
        Ok(GroupLabel { origin, engine, vendor_region, llm_kind })
    }

    /// Label for an original-language document.
    pub fn original(origin: Origin) -> Result<Self, CorpusError> {
        GroupLabel::new(origin, "", VendorRegion::NA, LlmKind::NA)
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// Engine code, empty for originals.
    pub fn engine(&self) -> &str {
        &self.engine
    }

    pub fn vendor_region(&self) -> VendorRegion {
        self.vendor_region
    }

    pub fn llm_kind(&self) -> LlmKind {
        self.llm_kind
    }

    /// Engine code for translations, origin code for originals.
    pub fn source_code(&self) -> &str {
        if self.engine.is_empty() {
            self.origin.as_str()
        } else {
            &self.engine
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    doc_id: String,
    group: GroupLabel,
    sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(
        doc_id: impl Into<String>,
        group: GroupLabel,
        sentences: Vec<Sentence>,
    ) -> Result<Self, CorpusError> {
        let doc_id = doc_id.into();
        if doc_id.trim().is_empty() || doc_id.contains(['\t', '\n', '\r']) || doc_id.trim() != doc_id {
            return Err(CorpusError::EmptyDocId);
        }
        if sentences.is_empty() {
            return Err(CorpusError::EmptyDocument(doc_id));
        }
        Ok(Document { doc_id, group, sentences })
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn group(&self) -> &GroupLabel {
        &self.group
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> + '_ {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    documents: Vec<Document>,
    tagset_id: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, tagset_id: impl Into<String>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(CorpusError::DuplicateDocId { doc_id: d.doc_id.clone(), line: None });
            }
        }
        Ok(Corpus { documents, tagset_id: tagset_id.into() })
    }

    /// Builds a corpus after checking every token's tags against `tagset`.
    pub fn with_tagset(documents: Vec<Document>, tagset: &Tagset) -> Result<Self, CorpusError> {
        for d in &documents {
            for t in d.tokens() {
                if !tagset.has_pos(&t.pos) {
                    return Err(CorpusError::UnknownTag { line: 0, column: 3, kind: "pos", tag: t.pos.clone() });
                }
                if !tagset.has_dep(&t.deprel) {
                    return Err(CorpusError::UnknownTag { line: 0, column: 5, kind: "dep", tag: t.deprel.clone() });
                }
            }
        }
        Corpus::new(documents, tagset.id())
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn tagset_id(&self) -> &str {
        &self.tagset_id
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Concatenates corpora tagged under the same tagset.
    pub fn merge(parts: Vec<Corpus>) -> Result<Corpus, CorpusError> {
        let mut iter = parts.into_iter();
        let Some(first) = iter.next() else {
            return Err(CorpusError::Tagset("no corpora to merge".into()));
        };
        let tagset_id = first.tagset_id;
        let mut documents = first.documents;
        for c in iter {
            if c.tagset_id != tagset_id {
                return Err(CorpusError::TagsetMismatch { expected: tagset_id, found: c.tagset_id });
            }
            documents.extend(c.documents);
        }
        Corpus::new(documents, tagset_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(s: &str, head: usize) -> Token {
        Token::new(s, "n", head, "ATT").unwrap()
    }

    #[test]
    fn token_invariants() {
        let t = tok("中国人", 0);
        assert_eq!(t.char_count(), 3);
        assert_eq!(t.script(), Script::Han);
        assert!(t.is_root());
        assert!(Token::new("", "n", 0, "HED").is_err());
    }

    #[test]
    fn sentence_rejects_bad_heads() {
        assert!(Sentence::new(vec![tok("a", 0), tok("b", 3)]).is_err());
        assert!(Sentence::new(vec![tok("a", 1)]).is_err());
        assert!(Sentence::new(vec![]).is_err());
    }

    #[test]
    fn terminator_from_last_punct() {
        let s = Sentence::new(vec![tok("好", 0), tok("吗", 1), tok("？", 1)]).unwrap();
        assert_eq!(s.terminator(), Terminator::Question);
        let s = Sentence::new(vec![tok("好", 0), tok("。", 1), tok("”", 1)]).unwrap();
        assert_eq!(s.terminator(), Terminator::Period);
        let s = Sentence::new(vec![tok("好", 0), tok("……", 1)]).unwrap();
        assert_eq!(s.terminator(), Terminator::Ellipsis);
        let s = Sentence::new(vec![tok("好", 0), tok("了", 1)]).unwrap();
        assert_eq!(s.terminator(), Terminator::Other);
        let s = Sentence::new(vec![tok("好", 0), tok("！", 1)]).unwrap();
        assert_eq!(s.terminator(), Terminator::Exclaim);
    }

    #[test]
    fn group_label_invariants() {
        assert!(GroupLabel::new(Origin::OCN, "NGT", VendorRegion::NA, LlmKind::NA).is_err());
        assert!(GroupLabel::new(Origin::NMT, "", VendorRegion::NA, LlmKind::NA).is_err());
        assert!(GroupLabel::new(Origin::NMT, "NGT", VendorRegion::Foreign, LlmKind::Generic).is_err());
        let l = GroupLabel::new(Origin::LLM, "LTO", VendorRegion::Foreign, LlmKind::TranslationSpecific)
            .unwrap();
        assert_eq!(l.source_code(), "LTO");
        assert_eq!(GroupLabel::original(Origin::OCN).unwrap().source_code(), "OCN");
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let s = Sentence::new(vec![tok("a", 0)]).unwrap();
        let label = GroupLabel::original(Origin::OCN).unwrap();
        let d = Document::new("d1", label, vec![s]).unwrap();
        let err = Corpus::new(vec![d.clone(), d], "x").unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateDocId { .. }));
    }
}
