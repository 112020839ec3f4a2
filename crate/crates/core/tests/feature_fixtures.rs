//! Feature-layer values on the committed fixture corpus against the Python
//! oracle in `tests/fixtures/features_oracle.py`.

use std::collections::BTreeMap;

use mtese_core::corpus::parse_corpus;
use mtese_core::features::{
    build_reference_profile, extract_lexical, extract_npos, extract_syntactical, extract_translatability,
    parse_npos_name, FeatureInventory,
};
use mtese_core::{Corpus, Tagset};
use serde::Deserialize;

const CONLL: &str = include_str!("fixtures/features.conll");
const EXPECTED: &str = include_str!("fixtures/features_expected.json");

type Profile = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Deserialize)]
struct Expected {
    documents: BTreeMap<String, BTreeMap<String, f64>>,
    corpus_profile: Profile,
    document_profiles: BTreeMap<String, Profile>,
}

fn fixture() -> (Corpus, Expected) {
    let parsed = parse_corpus(CONLL.as_bytes(), &Tagset::ltp()).unwrap();
    assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    (parsed.corpus, serde_json::from_str(EXPECTED).unwrap())
}

#[test]
fn document_features_match_oracle_exactly() {
    let (corpus, expected) = fixture();
    let inventory = FeatureInventory::base(&Tagset::ltp());
    assert_eq!(corpus.len(), expected.documents.len());
    let mut checked = 0;
    for doc in corpus.documents() {
        let mut values = extract_lexical(doc, &inventory);
        values.extend(extract_syntactical(doc, &inventory));
        values.extend(extract_translatability(doc).values);
        for (name, want) in &expected.documents[doc.doc_id()] {
            let got = values.get(name).unwrap_or_else(|| panic!("{name} missing"));
            assert_eq!(got, *want, "{} / {name}", doc.doc_id());
            checked += 1;
        }
    }
    assert_eq!(checked, 13 * corpus.len());
}

#[test]
fn long_document_uses_sttr_windows() {
    let (_, expected) = fixture();
    let g1 = &expected.documents["g1"];
    assert_ne!(g1["STTR"], g1["TTR"]);
}

#[test]
fn reference_profile_matches_oracle() {
    let (corpus, expected) = fixture();
    let profile = build_reference_profile(&corpus, corpus.tagset_id()).unwrap();
    for (n, grams) in &expected.corpus_profile {
        let n: usize = n.parse().unwrap();
        let got = profile.frequencies(n);
        assert_eq!(got.len(), grams.len(), "N={n}");
        for (g, want) in grams {
            assert_eq!(got[g], *want, "N={n} {g}");
        }
        let sum: f64 = got.values().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }
}

#[test]
fn document_gram_frequencies_match_oracle() {
    let (corpus, expected) = fixture();
    for doc in corpus.documents() {
        for (n, grams) in &expected.document_profiles[doc.doc_id()] {
            let requested: Vec<(String, Vec<String>)> = grams
                .keys()
                .map(|g| {
                    let tags: Vec<&str> = g.split(' ').collect();
                    let name = mtese_core::features::npos_name(&tags);
                    assert_eq!(parse_npos_name(&name).unwrap().len(), n.parse::<usize>().unwrap());
                    (name, tags.iter().map(|t| t.to_string()).collect())
                })
                .collect();
            let values = extract_npos(doc, &requested);
            for ((name, _), want) in requested.iter().zip(grams.values()) {
                assert_eq!(values.get(name).unwrap(), *want, "{} {name}", doc.doc_id());
            }
        }
    }
}
