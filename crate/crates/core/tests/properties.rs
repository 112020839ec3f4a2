//! Invariants checked as properties over generated inputs, plus point checks
//! against independently computed reference values.

mod common;

use common::*;
use mtese_core::classify::{stratified_folds, ClassificationReport};
use mtese_core::cluster::adjusted_rand_index;
use mtese_core::corpus::{parse_corpus, serialize_corpus, LTP_DEP, LTP_POS};
use mtese_core::features::{
    extract_lexical, extract_syntactical, keyness, mtld, pos_ratio_name, FeatureInventory, MTLD_THRESHOLD,
};
use mtese_core::matrix::Dataset;
use mtese_core::selection::{chi2_rank, quantile_bins};
use mtese_core::stats::{dagostino_k2, kruskal_wallis, one_way_anova};
use mtese_core::{Corpus, Document, GroupLabel, Origin, Sentence, Tagset, Token};
use proptest::prelude::*;

const SURFACES: [&str; 12] = ["我们", "发展", "的", "经济", "GDP", "很", "快", "，", "。", "？", "data", "2024"];

fn sentence_strategy() -> impl Strategy<Value = Sentence> {
    (1usize..9).prop_flat_map(|len| {
        (
            prop::collection::vec((0..SURFACES.len(), 0..LTP_POS.len(), 0..LTP_DEP.len()), len),
            0..len,
            prop::collection::vec(0usize..100, len),
        )
            .prop_map(move |(toks, root, heads)| {
                let tokens = toks
                    .iter()
                    .enumerate()
                    .map(|(i, &(s, p, d))| {
                        // any other token of the sentence, or 0 for the chosen root
                        let head = if i == root {
                            0
                        } else {
                            let h = heads[i] % (len - 1).max(1);
                            if h >= i { h + 2 } else { h + 1 }
                        };
                        Token::new(SURFACES[s], LTP_POS[p], head.min(len), LTP_DEP[d]).unwrap()
                    })
                    .collect();
                Sentence::new(tokens).unwrap()
            })
    })
}

fn corpus_strategy() -> impl Strategy<Value = Corpus> {
    prop::collection::vec(prop::collection::vec(sentence_strategy(), 1..6), 1..5).prop_map(|docs| {
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(i, s)| Document::new(format!("doc{i}"), GroupLabel::original(Origin::OCN).unwrap(), s).unwrap())
            .collect();
        Corpus::with_tagset(documents, &Tagset::ltp()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialize_parse_round_trip(corpus in corpus_strategy()) {
        let text = serialize_corpus(&corpus);
        let parsed = parse_corpus(text.as_bytes(), &Tagset::ltp()).unwrap();
        prop_assert_eq!(&parsed.corpus, &corpus);
        prop_assert_eq!(serialize_corpus(&parsed.corpus), text);
    }

    #[test]
    fn ratios_are_bounded_and_pos_ratios_sum_to_one(corpus in corpus_strategy()) {
        let inv = FeatureInventory::base(&Tagset::ltp());
        for doc in corpus.documents() {
            let lex = extract_lexical(doc, &inv);
            let syn = extract_syntactical(doc, &inv);
            let pos_sum: f64 = LTP_POS.iter().map(|t| lex.get(&pos_ratio_name(t)).unwrap()).sum();
            prop_assert!((pos_sum - 1.0).abs() < 1e-9);
            let dep_sum: f64 = LTP_DEP.iter().map(|r| syn.get(&format!("ratio_dep_{r}")).unwrap()).sum();
            prop_assert!((dep_sum - 1.0).abs() < 1e-9);
            for name in ["TTR", "HapaxRatio", "LexicalDensity", "SingleCharWordRatio", "LongWordRatio"] {
                let v = lex.get(name).unwrap();
                prop_assert!((0.0..=1.0).contains(&v), "{} = {}", name, v);
            }
            for name in ["QuestionRatio", "ExclamationRatio", "ratio_dep_leftward", "ratio_dep_adjacent"] {
                let v = syn.get(name).unwrap();
                prop_assert!((0.0..=1.0).contains(&v), "{} = {}", name, v);
            }
        }
    }

    #[test]
    fn mtld_ignores_surface_renaming(tokens in prop::collection::vec(0u8..12, 1..300), shift in 1u8..200) {
        let a: Vec<String> = tokens.iter().map(|t| format!("w{t}")).collect();
        let b: Vec<String> = tokens.iter().map(|t| format!("v{}", t.wrapping_add(shift))).collect();
        prop_assert_eq!(mtld(&a, MTLD_THRESHOLD), mtld(&b, MTLD_THRESHOLD));
    }

    #[test]
    fn chi2_matches_brute_force_and_survives_increasing_transforms(
        rows in prop::collection::vec((0usize..3, -50i32..50), 6..80),
        bins in 2usize..12,
    ) {
        let mut y: Vec<usize> = rows.iter().map(|r| r.0).collect();
        // every class present
        y[0] = 0; y[1] = 1; y[2] = 2;
        let raw: Vec<f64> = rows.iter().map(|r| r.1 as f64 / 7.0).collect();
        let x: Vec<Vec<f64>> = raw.iter().map(|&v| vec![v, v.exp(), v, 3.0]).collect();
        let result = chi2_rank(&Dataset::from_rows(x, y.clone(), 3), bins).unwrap();
        let score = |name: &str| result.ranked.iter().find(|r| r.feature == name).unwrap().chi2;
        prop_assert!((score("f0") - brute_chi2(&raw, &y, 3, bins)).abs() < 1e-9);
        prop_assert_eq!(score("f0"), score("f1"));
        // a duplicated column scores identically
        prop_assert_eq!(score("f0"), score("f2"));
        prop_assert_eq!(score("f3"), 0.0);
        prop_assert_eq!(quantile_bins(&raw, bins), brute_bins(&raw, bins));
    }

    #[test]
    fn ari_is_symmetric_and_label_invariant(
        pairs in prop::collection::vec((0usize..5, 0usize..4), 2..60),
        perm in Just([3usize, 0, 4, 1, 2]).prop_shuffle(),
    ) {
        let p: Vec<usize> = pairs.iter().map(|x| x.0).collect();
        let t: Vec<usize> = pairs.iter().map(|x| x.1).collect();
        let ari = adjusted_rand_index(&p, &t).unwrap();
        prop_assert!((ari - adjusted_rand_index(&t, &p).unwrap()).abs() < 1e-12);
        let relabeled: Vec<usize> = p.iter().map(|&c| perm[c] + 10).collect();
        prop_assert!((ari - adjusted_rand_index(&relabeled, &t).unwrap()).abs() < 1e-12);
        prop_assert!((ari - pair_ari(&p, &t)).abs() < 1e-12);
        prop_assert!(ari <= 1.0 + 1e-12);
    }

    #[test]
    fn kruskal_wallis_depends_on_ranks_only(
        groups in prop::collection::vec(prop::collection::vec(-20i32..20, 3..12), 2..5),
    ) {
        let g: Vec<Vec<f64>> = groups.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
        let h: Vec<Vec<f64>> = g.iter().map(|v| v.iter().map(|&x| (x / 5.0).exp() * 3.0 - 1.0).collect()).collect();
        let a = kruskal_wallis(&g);
        let b = kruskal_wallis(&h);
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }

    #[test]
    fn stratified_folds_partition_each_class(
        labels in prop::collection::vec(0usize..3, 15..120),
        folds in 2usize..6,
        seed in any::<u64>(),
    ) {
        let f = stratified_folds(&labels, 3, folds, seed);
        prop_assert_eq!(f.len(), labels.len());
        prop_assert!(f.iter().all(|&k| k < folds));
        for c in 0..3 {
            let mut sizes = vec![0usize; folds];
            for (&k, _) in f.iter().zip(&labels).filter(|(_, &y)| y == c) {
                sizes[k] += 1;
            }
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
        prop_assert_eq!(f, stratified_folds(&labels, 3, folds, seed));
    }
}

#[test]
fn kruskal_wallis_matches_hand_ranks_and_scipy() {
    let groups: Vec<Vec<f64>> = KW_GROUPS.iter().map(|g| g.to_vec()).collect();
    let r = kruskal_wallis(&groups);
    assert!((r.statistic - hand_kruskal()).abs() < 1e-9);
    // scipy.stats.kruskal
    assert!((r.statistic - 5.243710691823901).abs() < 1e-9);
    assert!((r.p_value - 0.07266791356100673).abs() < 1e-9);
}

#[test]
fn anova_matches_pooled_t_and_scipy() {
    let a = [3.1, 2.4, 5.6, 4.4, 3.9, 4.0];
    let b = [5.5, 6.1, 4.9, 7.2, 6.6];
    let c = [1.5, 2.5, 2.0, 3.5, 1.0];
    let two = one_way_anova(&[a.to_vec(), b.to_vec()]);
    assert!((two.statistic - pooled_t(&a, &b).powi(2)).abs() < 1e-9);
    // scipy.stats.f_oneway
    assert!((two.p_value - 0.006612102943785891).abs() < 1e-9);
    let three = one_way_anova(&[a.to_vec(), b.to_vec(), c.to_vec()]);
    assert!((three.statistic - 19.674857604679804).abs() < 1e-9);
    assert!((three.p_value - 0.0001168661367953799).abs() < 1e-9);
}

#[test]
fn dagostino_matches_scipy() {
    // scipy.stats.normaltest
    let x = [2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8, 3.9, 4.1, 2.2, 6.8, 3.0];
    let r = dagostino_k2(&x).unwrap();
    assert!((r.statistic - 2.9679409497198064).abs() < 1e-9);
    assert!((r.p_value - 0.22673565060909895).abs() < 1e-9);
    let skewed = [
        0.68, 1.02, 0.02, 0.002, 0.55, 1.63, 0.674, 0.755, 2.817, 6.058, 3.286, 0.001, 2.269, 0.072, 1.069,
        0.849, 3.15, 0.354, 0.307, 1.492, 0.037, 0.135, 1.03, 0.775, 1.738, 0.414, 0.448, 1.852, 1.725, 0.323,
    ];
    let r = dagostino_k2(&skewed).unwrap();
    assert!((r.statistic - 25.62897130651799).abs() < 1e-9);
    assert!((r.p_value - 2.7210692364650976e-06).abs() < 1e-12);
    assert!(dagostino_k2(&x[..7]).is_none());
}

#[test]
fn keyness_matches_hand_computation() {
    // E = (5, 10), G² = 2 (10 ln 2 + 5 ln 0.5) = 10 ln 2
    assert!((keyness(10, 100, 5, 200) - 10.0 * 2f64.ln()).abs() < 1e-12);
    // zero target cell smoothed to 0.5: E = (1.75, 1.75), under-used so negative
    let want = -2.0 * (0.5 * (0.5f64 / 1.75).ln() + 3.0 * (3.0f64 / 1.75).ln());
    assert!((keyness(0, 100, 3, 100) - want).abs() < 1e-12);
}

#[test]
fn shuffled_report_serializes_round_trip() {
    use mtese_core::classify::{evaluate_group, EvaluationProtocol, Hyperparameters};
    let (x, y) = gaussian_classes(&[-1.0, 1.0], 20, 3, 9);
    let data = Dataset::from_rows(x, y, 2);
    let r = evaluate_group("g", &data, &EvaluationProtocol::default(), &Hyperparameters::default()).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: ClassificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
}

#[test]
fn normal_groups_take_the_anova_path() {
    use mtese_core::stats::{contrast_groups, ContrastTest};
    let (x, _) = gaussian_classes(&[0.0, 5.0], 100, 1, 21);
    let groups: Vec<Vec<f64>> = x.chunks(100).map(|c| c.iter().map(|r| r[0]).collect()).collect();
    let r = contrast_groups("f", &["a".into(), "b".into()], &groups).unwrap();
    assert_eq!(r.test, ContrastTest::Anova);
    assert!(r.p_value < 1e-10);
}

#[test]
fn column_order_does_not_change_reports() {
    use mtese_core::classify::{evaluate_group, EvaluationProtocol, Hyperparameters};
    use mtese_core::cluster::{cluster_and_score, KMeansConfig};
    let (x, y) = gaussian_classes(&[-0.6, 0.0, 0.6], 30, 6, 33);
    let data = Dataset::from_rows(x, y, 3);
    let order = ["f3", "f0", "f5", "f1", "f4", "f2"];
    let permuted = data.select_features(&order).unwrap();
    let (p, hp) = (EvaluationProtocol::default(), Hyperparameters::default());
    let a = evaluate_group("g", &data, &p, &hp).unwrap();
    let b = evaluate_group("g", &permuted, &p, &hp).unwrap();
    assert_eq!(a.per_classifier, b.per_classifier);
    assert_eq!(a.acc_avg, b.acc_avg);
    let a_sel = chi2_rank(&data, 10).unwrap();
    let b_sel = chi2_rank(&permuted, 10).unwrap();
    assert_eq!(a_sel, b_sel);
    let names: Vec<String> = order.iter().map(|s| s.to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    let cfg = KMeansConfig::default();
    assert_eq!(
        cluster_and_score(&data, &sorted, &cfg, true).unwrap(),
        cluster_and_score(&permuted, &names, &cfg, true).unwrap()
    );
}
