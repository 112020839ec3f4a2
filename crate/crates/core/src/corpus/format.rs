//! The canonical tagged format.
//!
//! ```text
//! # free comment
//! #doc d001	OCN	-	NA	NA
//! 1	他	r	2	SBV
//! 2	来	v	0	HED
//! 3	了	u	2	RAD
//!
//! ```
//!
//! One token per line with TAB-separated `index surface pos head deprel`
//! columns; a blank line ends a sentence; `#doc` opens a document with its
//! group label (an empty engine may be written as `-`).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use super::{
    Corpus, CorpusError, Document, GroupLabel, LlmKind, Origin, Sentence, Tagset, Token,
    VendorRegion,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// A sentence with zero or several head-0 tokens; every head-0 token is
    /// treated as a root downstream.
    RootCount { doc_id: String, line: usize, roots: usize },
}

#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub warnings: Vec<ParseWarning>,
    /// First line of each document's `#doc` header.
    pub doc_lines: HashMap<String, usize>,
}

struct PendingDoc {
    doc_id: String,
    group: GroupLabel,
    line: usize,
    sentences: Vec<Sentence>,
}

struct PendingToken {
    line: usize,
    token: Token,
}

pub fn parse_corpus<R: BufRead>(input: R, tagset: &Tagset) -> Result<ParsedCorpus, CorpusError> {
    let mut documents = Vec::new();
    let mut doc_lines: HashMap<String, usize> = HashMap::new();
    let mut warnings = Vec::new();
    let mut current: Option<PendingDoc> = None;
    let mut sentence: Vec<PendingToken> = Vec::new();
    let mut line_no = 0usize;

    for line in input.lines() {
        line_no += 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if line.trim().is_empty() {
            flush_sentence(&mut sentence, &mut current, &mut warnings)?;
            continue;
        }
        if let Some(rest) = doc_header(line) {
            flush_sentence(&mut sentence, &mut current, &mut warnings)?;
            if let Some(doc) = current.take() {
                documents.push(finish_doc(doc)?);
            }
            let (doc_id, group) = parse_header(rest, line_no)?;
            if doc_lines.insert(doc_id.clone(), line_no).is_some() {
                return Err(CorpusError::DuplicateDocId { doc_id, line: Some(line_no) });
            }
            current = Some(PendingDoc { doc_id, group, line: line_no, sentences: Vec::new() });
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if current.is_none() {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                message: "token line before any #doc header".into(),
            });
        }
        let token = parse_token(line, line_no, sentence.len() + 1, tagset)?;
        sentence.push(PendingToken { line: line_no, token });
    }
    flush_sentence(&mut sentence, &mut current, &mut warnings)?;
    if let Some(doc) = current.take() {
        documents.push(finish_doc(doc)?);
    }
    let corpus = Corpus::new(documents, tagset.id())?;
    Ok(ParsedCorpus { corpus, warnings, doc_lines })
}

fn doc_header(line: &str) -> Option<&str> {
    let rest = line.strip_prefix("#doc")?;
    if rest.starts_with([' ', '\t']) {
        Some(rest.trim_start_matches([' ', '\t']))
    } else {
        None
    }
}

fn parse_header(rest: &str, line: usize) -> Result<(String, GroupLabel), CorpusError> {
    let fields: Vec<&str> = rest.split('\t').collect();
    if fields.len() != 5 {
        return Err(CorpusError::MalformedLine {
            line,
            message: format!("#doc header needs 5 TAB-separated fields, found {}", fields.len()),
        });
    }
    let bad = |e: CorpusError| CorpusError::MalformedLine { line, message: e.to_string() };
    let doc_id = fields[0].trim();
    if doc_id.is_empty() {
        return Err(CorpusError::MalformedLine { line, message: "empty doc_id".into() });
    }
    let origin: Origin = fields[1].trim().parse().map_err(bad)?;
    let engine = match fields[2].trim() {
        "-" => "",
        e => e,
    };
    let region: VendorRegion = fields[3].trim().parse().map_err(bad)?;
    let kind: LlmKind = fields[4].trim().parse().map_err(bad)?;
    let group = GroupLabel::new(origin, engine, region, kind).map_err(bad)?;
    Ok((doc_id.to_string(), group))
}

fn parse_token(
    line: &str,
    line_no: usize,
    expected_index: usize,
    tagset: &Tagset,
) -> Result<Token, CorpusError> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 5 {
        return Err(CorpusError::MalformedLine {
            line: line_no,
            message: format!("expected 5 TAB-separated columns, found {}", cols.len()),
        });
    }
    let index: usize = cols[0].parse().map_err(|_| CorpusError::MalformedLine {
        line: line_no,
        message: format!("token index `{}` is not a positive integer", cols[0]),
    })?;
    if index != expected_index {
        return Err(CorpusError::MalformedLine {
            line: line_no,
            message: format!("token index {index} out of sequence, expected {expected_index}"),
        });
    }
    let surface = cols[1];
    if surface.is_empty() {
        return Err(CorpusError::MalformedLine { line: line_no, message: "empty surface".into() });
    }
    let pos = cols[2];
    if !tagset.has_pos(pos) {
        return Err(CorpusError::UnknownTag { line: line_no, column: 3, kind: "pos", tag: pos.into() });
    }
    let head: usize = cols[3].parse().map_err(|_| CorpusError::MalformedLine {
        line: line_no,
        message: format!("head `{}` is not a non-negative integer", cols[3]),
    })?;
    let deprel = cols[4];
    if !tagset.has_dep(deprel) {
        return Err(CorpusError::UnknownTag { line: line_no, column: 5, kind: "dep", tag: deprel.into() });
    }
    Token::new(surface, pos, head, deprel)
}

fn flush_sentence(
    pending: &mut Vec<PendingToken>,
    doc: &mut Option<PendingDoc>,
    warnings: &mut Vec<ParseWarning>,
) -> Result<(), CorpusError> {
    if pending.is_empty() {
        return Ok(());
    }
    let doc = doc.as_mut().expect("tokens only accumulate inside a document");
    let len = pending.len();
    for (i, p) in pending.iter().enumerate() {
        let head = p.token.head();
        if head > len || head == i + 1 {
            return Err(CorpusError::DanglingHead { line: p.line, head, sentence_len: len });
        }
    }
    let first_line = pending[0].line;
    let tokens: Vec<Token> = pending.drain(..).map(|p| p.token).collect();
    let sentence = Sentence::new(tokens)?;
    let roots = sentence.root_count();
    if roots != 1 {
        log::warn!("{}: sentence at line {first_line} has {roots} roots", doc.doc_id);
        warnings.push(ParseWarning::RootCount { doc_id: doc.doc_id.clone(), line: first_line, roots });
    }
    doc.sentences.push(sentence);
    Ok(())
}

fn finish_doc(doc: PendingDoc) -> Result<Document, CorpusError> {
    if doc.sentences.is_empty() {
        return Err(CorpusError::MalformedLine {
            line: doc.line,
            message: format!("document `{}` has no sentences", doc.doc_id),
        });
    }
    Document::new(doc.doc_id, doc.group, doc.sentences)
}

/// Writes a corpus in the canonical format; parsing the output under the same
/// tagset yields an equal corpus.
pub fn serialize_corpus(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in corpus.documents() {
        let g = doc.group();
        let engine = if g.engine().is_empty() { "-" } else { g.engine() };
        writeln!(
            out,
            "#doc {}\t{}\t{}\t{}\t{}",
            doc.doc_id(),
            g.origin(),
            engine,
            g.vendor_region(),
            g.llm_kind()
        )
        .unwrap();
        for s in doc.sentences() {
            for (i, t) in s.tokens().iter().enumerate() {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", i + 1, t.surface(), t.pos(), t.head(), t.deprel())
                    .unwrap();
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Script;

    fn tagset() -> Tagset {
        Tagset::parse("[pos]\nr\nv\nu\nwp\nn\n[dep]\nSBV\nHED\nRAD\nWP\nVOB\n").unwrap()
    }

    const MINIMAL: &str = "#doc d1\tOCN\t-\tNA\tNA\n1\t他\tr\t2\tSBV\n2\t来\tv\t0\tHED\n3\t了\tu\t2\tRAD\n";

    #[test]
    fn parses_minimal_document() {
        let parsed = parse_corpus(MINIMAL.as_bytes(), &tagset()).unwrap();
        let c = &parsed.corpus;
        assert_eq!(c.len(), 1);
        let doc = &c.documents()[0];
        assert_eq!(doc.token_count(), 3);
        let s = &doc.sentences()[0];
        let roots: Vec<usize> =
            s.tokens().iter().enumerate().filter(|(_, t)| t.is_root()).map(|(i, _)| i + 1).collect();
        assert_eq!(roots, vec![2]);
        assert!(parsed.warnings.is_empty());
        assert_eq!(c.tagset_id(), tagset().id());
    }

    #[test]
    fn dangling_head_names_line() {
        let input = MINIMAL.replace("1\t他\tr\t2\tSBV", "1\t他\tr\t5\tSBV");
        match parse_corpus(input.as_bytes(), &tagset()) {
            Err(CorpusError::DanglingHead { line, head, sentence_len }) => {
                assert_eq!((line, head, sentence_len), (2, 5, 3));
            }
            other => panic!("expected DanglingHead, got {other:?}"),
        }
    }

    #[test]
    fn self_head_is_dangling() {
        let input = MINIMAL.replace("1\t他\tr\t2\tSBV", "1\t他\tr\t1\tSBV");
        assert!(matches!(
            parse_corpus(input.as_bytes(), &tagset()),
            Err(CorpusError::DanglingHead { line: 2, .. })
        ));
    }

    #[test]
    fn error_paths() {
        let ts = tagset();
        let bad_cols = MINIMAL.replace("2\t来\tv\t0\tHED", "2\t来\tv\t0");
        assert!(matches!(
            parse_corpus(bad_cols.as_bytes(), &ts),
            Err(CorpusError::MalformedLine { line: 3, .. })
        ));
        let unknown = MINIMAL.replace("2\t来\tv\t0\tHED", "2\t来\tvv\t0\tHED");
        assert!(matches!(
            parse_corpus(unknown.as_bytes(), &ts),
            Err(CorpusError::UnknownTag { line: 3, column: 3, .. })
        ));
        let unknown_dep = MINIMAL.replace("2\t来\tv\t0\tHED", "2\t来\tv\t0\tROOT");
        assert!(matches!(
            parse_corpus(unknown_dep.as_bytes(), &ts),
            Err(CorpusError::UnknownTag { column: 5, .. })
        ));
        let dup = format!("{MINIMAL}\n{MINIMAL}");
        assert!(matches!(
            parse_corpus(dup.as_bytes(), &ts),
            Err(CorpusError::DuplicateDocId { line: Some(6), .. })
        ));
        let orphan = "1\t他\tr\t0\tSBV\n";
        assert!(matches!(
            parse_corpus(orphan.as_bytes(), &ts),
            Err(CorpusError::MalformedLine { line: 1, .. })
        ));
        let skipped = MINIMAL.replace("3\t了", "4\t了");
        assert!(matches!(
            parse_corpus(skipped.as_bytes(), &ts),
            Err(CorpusError::MalformedLine { line: 4, .. })
        ));
        let bad_label = MINIMAL.replace("OCN\t-", "NMT\t-");
        assert!(matches!(
            parse_corpus(bad_label.as_bytes(), &ts),
            Err(CorpusError::MalformedLine { line: 1, .. })
        ));
        let empty_doc = "#doc d0\tOCN\t-\tNA\tNA\n# nothing\n";
        assert!(parse_corpus(empty_doc.as_bytes(), &ts).is_err());
    }

    #[test]
    fn multi_root_is_a_warning() {
        let input = MINIMAL.replace("1\t他\tr\t2\tSBV", "1\t他\tr\t0\tSBV");
        let parsed = parse_corpus(input.as_bytes(), &tagset()).unwrap();
        assert_eq!(
            parsed.warnings,
            vec![ParseWarning::RootCount { doc_id: "d1".into(), line: 2, roots: 2 }]
        );
    }

    #[test]
    fn comments_and_sentence_breaks() {
        let input = "# header\n#doc d1\tLLM\tLTO\tForeign\tTranslationSpecific\n\
                     1\t他\tr\t2\tSBV\n2\t来\tv\t0\tHED\n3\t。\twp\t2\tWP\n\n\n\
                     # mid comment\n1\t好\tv\t0\tHED\n\
                     #doc d2\tOCN\t\tNA\tNA\n1\tGDP\tn\t0\tHED\n";
        let parsed = parse_corpus(input.as_bytes(), &tagset()).unwrap();
        let docs = parsed.corpus.documents();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].sentences().len(), 2);
        assert_eq!(docs[0].group().engine(), "LTO");
        assert_eq!(docs[1].group().engine(), "");
        assert_eq!(docs[1].sentences()[0].tokens()[0].script(), Script::Latin);
        assert_eq!(parsed.doc_lines["d2"], 10);

        let text = serialize_corpus(&parsed.corpus);
        let again = parse_corpus(text.as_bytes(), &tagset()).unwrap();
        assert_eq!(again.corpus, parsed.corpus);
    }
}
