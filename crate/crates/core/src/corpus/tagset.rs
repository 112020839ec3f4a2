use std::collections::HashSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::CorpusError;

/// Legal PoS tags and dependency relations for a corpus.
///
/// Declaration order is kept; it fixes the column order of the per-tag and
/// per-relation ratio features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tagset {
    id: String,
    pos: Vec<String>,
    dep: Vec<String>,
    pos_set: HashSet<String>,
    dep_set: HashSet<String>,
}

#[derive(Clone, Copy)]
enum Section {
    None,
    Pos,
    Dep,
}

/// PoS inventory of the LTP tagger.
pub const LTP_POS: [&str; 29] = [
    "a", "b", "c", "d", "e", "g", "h", "i", "j", "k", "m", "n", "nd", "nh", "ni", "nl", "ns", "nt",
    "nz", "o", "p", "q", "r", "u", "v", "wp", "ws", "x", "z",
];

/// Dependency relations of the LTP parser.
pub const LTP_DEP: [&str; 15] = [
    "SBV", "VOB", "IOB", "FOB", "DBL", "ATT", "ADV", "CMP", "COO", "POB", "LAD", "RAD", "IS", "WP",
    "HED",
];

impl Tagset {
    pub fn new<P, D>(pos: P, dep: D) -> Result<Self, CorpusError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        D: IntoIterator,
        D::Item: Into<String>,
    {
        let pos: Vec<String> = pos.into_iter().map(Into::into).collect();
        let dep: Vec<String> = dep.into_iter().map(Into::into).collect();
        if pos.is_empty() || dep.is_empty() {
            return Err(CorpusError::Tagset("both [pos] and [dep] must be non-empty".into()));
        }
        let pos_set: HashSet<String> = pos.iter().cloned().collect();
        let dep_set: HashSet<String> = dep.iter().cloned().collect();
        if pos_set.len() != pos.len() {
            return Err(CorpusError::Tagset("duplicate PoS tag".into()));
        }
        if dep_set.len() != dep.len() {
            return Err(CorpusError::Tagset("duplicate dependency relation".into()));
        }
        let id = digest_id(&pos, &dep);
        Ok(Tagset { id, pos, dep, pos_set, dep_set })
    }

    /// The LTP tag inventory used when no declaration file is given.
    pub fn ltp() -> Self {
        Tagset::new(LTP_POS, LTP_DEP).expect("built-in tagset is valid")
    }

    /// Parses a declaration: labels one per line under `[pos]` and `[dep]`
    /// headers, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut section = Section::None;
        let mut pos = Vec::new();
        let mut dep = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[pos]" => section = Section::Pos,
                "[dep]" => section = Section::Dep,
                _ if line.starts_with('[') => {
                    return Err(CorpusError::Tagset(format!(
                        "line {}: unknown section header {line}",
                        i + 1
                    )))
                }
                _ => match section {
                    Section::Pos => pos.push(line.to_string()),
                    Section::Dep => dep.push(line.to_string()),
                    Section::None => {
                        return Err(CorpusError::Tagset(format!(
                            "line {}: label outside of a section",
                            i + 1
                        )))
                    }
                },
            }
        }
        Tagset::new(pos, dep)
    }

    pub fn to_declaration(&self) -> String {
        let mut out = String::from("[pos]\n");
        for t in &self.pos {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("[dep]\n");
        for t in &self.dep {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    /// Content digest of the declaration; two tagsets with equal labels in
    /// equal order share an id.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn pos_tags(&self) -> &[String] {
        &self.pos
    }

    pub fn dep_relations(&self) -> &[String] {
        &self.dep
    }

    pub fn has_pos(&self, tag: &str) -> bool {
        self.pos_set.contains(tag)
    }

    pub fn has_dep(&self, rel: &str) -> bool {
        self.dep_set.contains(rel)
    }
}

fn digest_id(pos: &[String], dep: &[String]) -> String {
    let mut hasher = Sha256::new();
    for t in pos {
        hasher.update(b"pos\t");
        hasher.update(t.as_bytes());
        hasher.update(b"\n");
    }
    for t in dep {
        hasher.update(b"dep\t");
        hasher.update(t.as_bytes());
        hasher.update(b"\n");
    }
    let digest = hasher.finalize();
    let mut id = String::with_capacity(16);
    for b in digest.iter().take(8) {
        write!(id, "{b:02x}").unwrap();
    }
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_declaration() {
        let ts = Tagset::parse("# tags\n[pos]\nn\nv\n\n[dep]\nSBV\nHED\n").unwrap();
        assert_eq!(ts.pos_tags(), &["n", "v"]);
        assert!(ts.has_dep("HED"));
        assert!(!ts.has_pos("x"));
        let again = Tagset::parse(&ts.to_declaration()).unwrap();
        assert_eq!(ts, again);
        assert_eq!(ts.id(), again.id());
    }

    #[test]
    fn rejects_bad_declarations() {
        assert!(Tagset::parse("n\n[pos]\n").is_err());
        assert!(Tagset::parse("[pos]\nn\nn\n[dep]\nA\n").is_err());
        assert!(Tagset::parse("[pos]\nn\n").is_err());
        assert!(Tagset::parse("[tags]\nn\n").is_err());
    }

    #[test]
    fn ltp_inventory_sizes() {
        let ts = Tagset::ltp();
        assert_eq!(ts.pos_tags().len(), 29);
        assert_eq!(ts.dep_relations().len(), 15);
        assert_ne!(ts.id(), Tagset::new(["n"], ["HED"]).unwrap().id());
    }
}
