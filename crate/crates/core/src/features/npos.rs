//! PoS N-gram profiles, keyness-based gram selection, and per-document gram
//! frequencies.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{npos_name, FeatureError, FeatureVector};
use crate::corpus::{Corpus, Document};

pub const MAX_N: usize = 3;
const PROFILE_FORMAT: &str = "mtese-npos-profile";
const PROFILE_VERSION: u32 = 1;

/// Sentence-bounded PoS N-gram counts (N = 1..=3) of a reference corpus.
///
/// Gram keys are tags joined by single spaces. Counts are kept alongside the
/// relative frequencies because keyness needs the sample sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    tagset_id: String,
    counts: Vec<BTreeMap<String, u64>>,
    totals: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    profile: ReferenceProfile,
}

impl ReferenceProfile {
    pub fn tagset_id(&self) -> &str {
        &self.tagset_id
    }

    /// Relative frequency of `gram` among all `n`-grams; 0 when unseen.
    pub fn frequency(&self, n: usize, gram: &str) -> f64 {
        let total = self.totals[n - 1];
        if total == 0 {
            return 0.0;
        }
        self.counts[n - 1].get(gram).copied().unwrap_or(0) as f64 / total as f64
    }

    pub fn count(&self, n: usize, gram: &str) -> u64 {
        self.counts[n - 1].get(gram).copied().unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> u64 {
        self.totals[n - 1]
    }

    /// All relative frequencies for one `n`.
    pub fn frequencies(&self, n: usize) -> BTreeMap<String, f64> {
        self.counts[n - 1].keys().map(|g| (g.clone(), self.frequency(n, g))).collect()
    }

    /// Writes the versioned cache file (JSON, tagset id embedded).
    pub fn write_cache<W: Write>(&self, writer: W) -> Result<(), FeatureError> {
        let file = ProfileFile { format: PROFILE_FORMAT.into(), version: PROFILE_VERSION, profile: self.clone() };
        serde_json::to_writer_pretty(writer, &file).map_err(|e| FeatureError::ProfileCache(e.to_string()))
    }

    /// Reads a cache file, rejecting other versions and other tagsets.
    pub fn read_cache<R: Read>(reader: R, expected_tagset: &str) -> Result<Self, FeatureError> {
        let file: ProfileFile =
            serde_json::from_reader(reader).map_err(|e| FeatureError::ProfileCache(e.to_string()))?;
        if file.format != PROFILE_FORMAT || file.version != PROFILE_VERSION {
            return Err(FeatureError::ProfileCache(format!(
                "unsupported profile format {} v{}",
                file.format, file.version
            )));
        }
        let p = file.profile;
        if p.counts.len() != MAX_N || p.totals.len() != MAX_N {
            return Err(FeatureError::ProfileCache("profile must hold N = 1..3".into()));
        }
        for n in 0..MAX_N {
            if p.counts[n].values().sum::<u64>() != p.totals[n] {
                return Err(FeatureError::ProfileCache(format!("{}-gram counts do not sum to total", n + 1)));
            }
        }
        if p.tagset_id != expected_tagset {
            return Err(FeatureError::TagsetMismatch { expected: expected_tagset.into(), found: p.tagset_id });
        }
        Ok(p)
    }
}

/// Sentence-bounded gram counts of one document or corpus.
pub(crate) fn count_grams<'a>(
    docs: impl IntoIterator<Item = &'a Document>,
) -> (Vec<BTreeMap<String, u64>>, Vec<u64>) {
    let mut counts = vec![BTreeMap::new(); MAX_N];
    let mut totals = vec![0u64; MAX_N];
    for doc in docs {
        for s in doc.sentences() {
            let tags: Vec<&str> = s.tokens().iter().map(|t| t.pos()).collect();
            for n in 1..=MAX_N {
                for w in tags.windows(n) {
                    *counts[n - 1].entry(w.join(" ")).or_insert(0) += 1;
                    totals[n - 1] += 1;
                }
            }
        }
    }
    (counts, totals)
}

/// Builds the reference profile; `expected_tagset` guards against comparing
/// corpora tagged with different tag inventories.
pub fn build_reference_profile(reference: &Corpus, expected_tagset: &str) -> Result<ReferenceProfile, FeatureError> {
    if reference.tagset_id() != expected_tagset {
        return Err(FeatureError::TagsetMismatch {
            expected: expected_tagset.into(),
            found: reference.tagset_id().into(),
        });
    }
    let (counts, totals) = count_grams(reference.documents());
    Ok(ReferenceProfile { tagset_id: reference.tagset_id().into(), counts, totals })
}

/// Signed log-likelihood keyness of a target count against a reference count.
///
/// Dunning's G² with zero cells replaced by 0.5; the sign is positive when the
/// item is relatively more frequent in the target.
pub fn keyness(target: u64, target_total: u64, reference: u64, reference_total: u64) -> f64 {
    if target_total == 0 || reference_total == 0 {
        return 0.0;
    }
    let a = if target == 0 { 0.5 } else { target as f64 };
    let b = if reference == 0 { 0.5 } else { reference as f64 };
    let c = target_total as f64;
    let d = reference_total as f64;
    let e1 = c * (a + b) / (c + d);
    let e2 = d * (a + b) / (c + d);
    let g2 = 2.0 * (a * (a / e1).ln() + b * (b / e2).ln());
    let sign = if a / c > b / d {
        1.0
    } else if a / c < b / d {
        -1.0
    } else {
        0.0
    };
    sign * g2.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyedGram {
    pub name: String,
    pub n: usize,
    pub keyness: f64,
    pub target_count: u64,
    pub reference_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NposWarning {
    InsufficientCandidates { n: usize, requested: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NposSelection {
    /// Feature names in inventory order (all kept 1-grams, then 2-, then 3-grams).
    pub names: Vec<String>,
    pub ranked: Vec<KeyedGram>,
    pub warnings: Vec<NposWarning>,
}

/// Ranks candidate grams (seen in target or reference) by signed keyness and
/// keeps the top `sizes[N-1]` per N. Ties go to the higher target count, then
/// to the lexicographically smaller gram.
pub fn select_npos_inventory(
    target: &Corpus,
    reference: &ReferenceProfile,
    sizes: [usize; MAX_N],
) -> Result<NposSelection, FeatureError> {
    if target.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    if target.tagset_id() != reference.tagset_id() {
        return Err(FeatureError::TagsetMismatch {
            expected: reference.tagset_id().into(),
            found: target.tagset_id().into(),
        });
    }
    let (counts, totals) = count_grams(target.documents());
    let mut names = Vec::new();
    let mut ranked_all = Vec::new();
    let mut warnings = Vec::new();
    for n in 1..=MAX_N {
        let candidates: BTreeSet<&String> = counts[n - 1].keys().chain(reference.counts[n - 1].keys()).collect();
        let mut ranked: Vec<KeyedGram> = candidates
            .into_iter()
            .map(|g| {
                let tc = counts[n - 1].get(g).copied().unwrap_or(0);
                let rc = reference.count(n, g);
                KeyedGram {
                    name: g.clone(),
                    n,
                    keyness: keyness(tc, totals[n - 1], rc, reference.total(n)),
                    target_count: tc,
                    reference_count: rc,
                }
            })
            .collect();
        ranked.sort_by(|x, y| {
            y.keyness
                .total_cmp(&x.keyness)
                .then(y.target_count.cmp(&x.target_count))
                .then(x.name.cmp(&y.name))
        });
        let want = sizes[n - 1];
        if ranked.len() < want {
            log::warn!("only {} candidate {n}-grams for {want} requested; keeping all", ranked.len());
            warnings.push(NposWarning::InsufficientCandidates { n, requested: want, available: ranked.len() });
        }
        for g in ranked.iter().take(want) {
            let tags: Vec<&str> = g.name.split(' ').collect();
            names.push(npos_name(&tags));
        }
        ranked_all.extend(ranked);
    }
    Ok(NposSelection { names, ranked: ranked_all, warnings })
}

/// Per-document relative frequency of each requested gram among the
/// document's grams of the same N.
pub fn extract_npos(doc: &Document, grams: &[(String, Vec<String>)]) -> FeatureVector {
    let (counts, totals) = count_grams(std::iter::once(doc));
    let mut out = FeatureVector::new(doc.doc_id());
    for (name, tags) in grams {
        let n = tags.len();
        let c = counts[n - 1].get(&tags.join(" ")).copied().unwrap_or(0);
        let v = if totals[n - 1] == 0 { 0.0 } else { c as f64 / totals[n - 1] as f64 };
        out.push(name.clone(), v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyness_is_zero_for_equal_proportions() {
        assert_eq!(keyness(10, 100, 20, 200), 0.0);
        assert_eq!(keyness(5, 0, 3, 10), 0.0);
    }

    #[test]
    fn keyness_sign_follows_overuse() {
        assert!(keyness(30, 100, 10, 100) > 0.0);
        assert!(keyness(10, 100, 30, 100) < 0.0);
        // signed keyness decreases as the reference count grows
        let mut prev = f64::INFINITY;
        for b in 0..50 {
            let k = keyness(7, 1000, b, 1000);
            assert!(k < prev);
            prev = k;
        }
    }
}
