//! The five-classifier ensemble, cross-validated evaluation of a grouping, and
//! the pairwise engine heatmap.

mod models;
mod tree;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grouping::{pair_dataset, GroupingError};
use crate::matrix::{Dataset, FeatureMatrix};
use crate::selection::{chi2_rank, select_top_k, SelectionError};

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("class `{0}` is missing from the training split")]
    MissingClassInTrain(String),
    #[error("row {row}, feature {feature} is not finite")]
    NonFiniteFeature { row: usize, feature: usize },
    #[error("{folds} folds need at least {folds} documents per class; class `{class}` has {size}")]
    FoldTooSmall { folds: usize, class: String, size: usize },
    #[error("at least 2 folds are required, got {0}")]
    TooFewFolds(usize),
    #[error("dataset has no features")]
    NoFeatures,
    #[error("train and test feature counts differ ({train} vs {test})")]
    ShapeMismatch { train: usize, test: usize },
    #[error("need at least 2 engines for a heatmap, got {0}")]
    TooFewEngines(usize),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("unknown classifier `{0}`")]
    UnknownClassifier(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    NaiveBayes,
    LogisticRegression,
    LinearSvm,
    DecisionTree,
    RandomForest,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::LogisticRegression,
        ClassifierKind::LinearSvm,
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "NB",
            ClassifierKind::LogisticRegression => "LR",
            ClassifierKind::LinearSvm => "SVM",
            ClassifierKind::DecisionTree => "DT",
            ClassifierKind::RandomForest => "RF",
        }
    }

    /// Scale-sensitive learners see z-scored features.
    pub fn standardizes(&self) -> bool {
        matches!(self, ClassifierKind::LogisticRegression | ClassifierKind::LinearSvm)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassifierKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ClassifyError::UnknownClassifier(s.into()))
    }
}

/// Pinned hyperparameters of the five classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparameters {
    pub version: u32,
    /// Relative to the largest feature variance of the training split.
    pub nb_var_floor: f64,
    pub lr_lambda: f64,
    pub lr_epochs: usize,
    pub lr_tol: f64,
    pub svm_lambda: f64,
    pub svm_epochs: usize,
    pub tree_max_depth: Option<usize>,
    pub tree_min_split: usize,
    pub forest_trees: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            version: 1,
            nb_var_floor: 1e-9,
            lr_lambda: 1e-4,
            lr_epochs: 500,
            lr_tol: 1e-6,
            svm_lambda: 1e-4,
            svm_epochs: 1000,
            tree_max_depth: None,
            tree_min_split: 2,
            forest_trees: 100,
        }
    }
}

/// Stratified k-fold cross-validation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationProtocol {
    pub folds: usize,
    pub seed: u64,
}

impl Default for EvaluationProtocol {
    fn default() -> Self {
        EvaluationProtocol { folds: 5, seed: 42 }
    }
}

pub(crate) trait Model: Send + Sync {
    fn predict(&self, x: &[f64]) -> usize;
}

/// SplitMix64 step: derives an independent stream seed from a parent seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Column means and standard deviations of a training split; zero-variance
/// columns are centred but not scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len() as f64;
        let p = x.first().map_or(0, Vec::len);
        let mean: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let std = (0..p)
            .map(|j| {
                let v = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if v > 0.0 {
                    v.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|r| r.iter().enumerate().map(|(j, v)| (v - self.mean[j]) / self.std[j]).collect())
            .collect()
    }
}

fn check_finite(x: &[Vec<f64>]) -> Result<(), ClassifyError> {
    for (row, r) in x.iter().enumerate() {
        if let Some(feature) = r.iter().position(|v| !v.is_finite()) {
            return Err(ClassifyError::NonFiniteFeature { row, feature });
        }
    }
    Ok(())
}

/// Trains `kind` on `train` and predicts every row of `test`. Standardization
/// is the caller's job (see [`evaluate_group`]).
pub fn fit_predict(
    kind: ClassifierKind,
    hp: &Hyperparameters,
    train_x: &[Vec<f64>],
    train_y: &[usize],
    n_classes: usize,
    test_x: &[Vec<f64>],
    seed: u64,
) -> Result<Vec<usize>, ClassifyError> {
    check_finite(train_x)?;
    check_finite(test_x)?;
    let p = train_x.first().map_or(0, Vec::len);
    if p == 0 {
        return Err(ClassifyError::NoFeatures);
    }
    if let Some(t) = test_x.iter().find(|r| r.len() != p) {
        return Err(ClassifyError::ShapeMismatch { train: p, test: t.len() });
    }
    for c in 0..n_classes {
        if !train_y.contains(&c) {
            return Err(ClassifyError::MissingClassInTrain(format!("class {c}")));
        }
    }
    let model: Box<dyn Model> = match kind {
        ClassifierKind::NaiveBayes => Box::new(models::GaussianNb::fit(train_x, train_y, n_classes, hp)),
        ClassifierKind::LogisticRegression => {
            Box::new(models::LogisticRegression::fit(train_x, train_y, n_classes, hp))
        }
        ClassifierKind::LinearSvm => Box::new(models::LinearSvm::fit(train_x, train_y, n_classes, hp)),
        ClassifierKind::DecisionTree => Box::new(tree::DecisionTree::fit(train_x, train_y, n_classes, hp, seed)),
        ClassifierKind::RandomForest => Box::new(tree::RandomForest::fit(train_x, train_y, n_classes, hp, seed)),
    };
    Ok(test_x.iter().map(|r| model.predict(r)).collect())
}

/// Stratified fold id of every row: each class is shuffled and dealt
/// round-robin, continuing the deal across classes so fold sizes differ by
/// at most one.
pub fn stratified_folds(y: &[usize], n_classes: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0; y.len()];
    let mut next = 0;
    for c in 0..n_classes {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            out[i] = next % folds;
            next += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierScore {
    pub classifier: ClassifierKind,
    pub acc: f64,
    pub f1_macro: f64,
    pub correct: usize,
    pub total: usize,
    /// `confusion[true][predicted]`, pooled over folds.
    pub confusion: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub grouping: String,
    pub class_names: Vec<String>,
    pub features: Vec<String>,
    pub protocol: EvaluationProtocol,
    pub per_classifier: Vec<ClassifierScore>,
    pub acc_avg: f64,
    pub f1_avg: f64,
    /// Mean over classifiers of the correctly classified count.
    pub correct_avg: f64,
    pub total: usize,
}

impl ClassificationReport {
    /// `correct/total` with the averaged count rounded to the nearest document.
    pub fn c_over_t(&self) -> String {
        format!("{}/{}", self.correct_avg.round() as usize, self.total)
    }
}

/// Macro-averaged F1 from a confusion matrix; classes with no true and no
/// predicted documents are skipped, and an undefined per-class F1 counts as 0.
pub fn macro_f1(confusion: &[Vec<usize>]) -> f64 {
    let k = confusion.len();
    let mut sum = 0.0;
    let mut used = 0;
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let actual: usize = confusion[c].iter().sum();
        let predicted: usize = confusion.iter().map(|r| r[c]).sum();
        if actual == 0 && predicted == 0 {
            continue;
        }
        used += 1;
        let denom = (actual + predicted) as f64;
        if denom > 0.0 {
            sum += 2.0 * tp / denom;
        }
    }
    if used == 0 {
        0.0
    } else {
        sum / used as f64
    }
}

/// Arithmetic means of per-classifier accuracy and F1.
pub fn average_scores(scores: &[ClassifierScore]) -> (f64, f64) {
    let n = scores.len() as f64;
    let acc = scores.iter().map(|s| s.acc).sum::<f64>() / n;
    let f1 = scores.iter().map(|s| s.f1_macro).sum::<f64>() / n;
    (acc, f1)
}

/// Cross-validates all five classifiers on identical folds.
pub fn evaluate_group(
    grouping: &str,
    data: &Dataset,
    protocol: &EvaluationProtocol,
    hp: &Hyperparameters,
) -> Result<ClassificationReport, ClassifyError> {
    evaluate_with(grouping, data, protocol, hp, &ClassifierKind::ALL)
}

/// [`evaluate_group`] restricted to the given classifiers.
pub fn evaluate_with(
    grouping: &str,
    data: &Dataset,
    protocol: &EvaluationProtocol,
    hp: &Hyperparameters,
    kinds: &[ClassifierKind],
) -> Result<ClassificationReport, ClassifyError> {
    if protocol.folds < 2 {
        return Err(ClassifyError::TooFewFolds(protocol.folds));
    }
    if data.feature_names.is_empty() {
        return Err(ClassifyError::NoFeatures);
    }
    check_finite(&data.x)?;
    let k = data.n_classes();
    for (c, &size) in data.class_counts().iter().enumerate() {
        if size < protocol.folds {
            return Err(ClassifyError::FoldTooSmall {
                folds: protocol.folds,
                class: data.class_names[c].clone(),
                size,
            });
        }
    }
    let fold_of = stratified_folds(&data.y, k, protocol.folds, derive_seed(protocol.seed, 0));
    // models see columns sorted by name, so column order never changes a score
    let input_names = data.feature_names.clone();
    let data = &canonical_columns(data);
    let tasks: Vec<(usize, usize)> =
        (0..protocol.folds).flat_map(|f| (0..kinds.len()).map(move |c| (f, c))).collect();
    let results: Vec<(usize, usize, Vec<usize>, Vec<usize>)> = tasks
        .par_iter()
        .map(|&(f, ci)| {
            let kind = kinds[ci];
            let train: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] != f).collect();
            let test: Vec<usize> = (0..data.len()).filter(|&i| fold_of[i] == f).collect();
            let mut train_x: Vec<Vec<f64>> = train.iter().map(|&i| data.x[i].clone()).collect();
            let mut test_x: Vec<Vec<f64>> = test.iter().map(|&i| data.x[i].clone()).collect();
            if kind.standardizes() {
                let s = Standardizer::fit(&train_x);
                train_x = s.transform(&train_x);
                test_x = s.transform(&test_x);
            }
            let train_y: Vec<usize> = train.iter().map(|&i| data.y[i]).collect();
            let seed = derive_seed(protocol.seed, 1 + (f * ClassifierKind::ALL.len() + kind as usize) as u64);
            let pred = fit_predict(kind, hp, &train_x, &train_y, k, &test_x, seed).map_err(|e| match e {
                ClassifyError::MissingClassInTrain(_) => {
                    let missing = (0..k).find(|c| !train_y.contains(c)).unwrap_or(0);
                    ClassifyError::MissingClassInTrain(data.class_names[missing].clone())
                }
                other => other,
            })?;
            Ok((f, ci, test, pred))
        })
        .collect::<Result<_, ClassifyError>>()?;

    let mut per_classifier = Vec::with_capacity(kinds.len());
    for (ci, &kind) in kinds.iter().enumerate() {
        let mut confusion = vec![vec![0usize; k]; k];
        for (_, c, test, pred) in results.iter().filter(|r| r.1 == ci) {
            debug_assert_eq!(*c, ci);
            for (&i, &p) in test.iter().zip(pred) {
                confusion[data.y[i]][p] += 1;
            }
        }
        let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
        let total = data.len();
        per_classifier.push(ClassifierScore {
            classifier: kind,
            acc: correct as f64 / total as f64,
            f1_macro: macro_f1(&confusion),
            correct,
            total,
            confusion,
        });
    }
    let (acc_avg, f1_avg) = average_scores(&per_classifier);
    let correct_avg = per_classifier.iter().map(|s| s.correct as f64).sum::<f64>() / per_classifier.len() as f64;
    Ok(ClassificationReport {
        grouping: grouping.into(),
        class_names: data.class_names.clone(),
        features: input_names,
        protocol: protocol.clone(),
        per_classifier,
        acc_avg,
        f1_avg,
        correct_avg,
        total: data.len(),
    })
}

/// `data` with its columns reordered by feature name.
pub(crate) fn canonical_columns(data: &Dataset) -> Dataset {
    let mut names = data.feature_names.clone();
    names.sort();
    data.select_features(&names).expect("sorted names come from the dataset")
}

/// Averaged pairwise accuracy between sources; the diagonal is undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub codes: Vec<String>,
    pub acc: Vec<Vec<Option<f64>>>,
}

/// For every unordered pair of sources (engine codes or origin codes such as
/// `OCN`): χ² selection of the top `k` features on that pair, then the
/// five-classifier evaluation.
pub fn pairwise_heatmap(
    matrix: &FeatureMatrix,
    codes: &[String],
    protocol: &EvaluationProtocol,
    hp: &Hyperparameters,
    k: usize,
    bins: usize,
) -> Result<HeatmapGrid, ClassifyError> {
    if codes.len() < 2 {
        return Err(ClassifyError::TooFewEngines(codes.len()));
    }
    let pairs: Vec<(usize, usize)> =
        (0..codes.len()).flat_map(|a| (a + 1..codes.len()).map(move |b| (a, b))).collect();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let data = pair_dataset(matrix, &codes[a], &codes[b])?;
            let sel = select_top_k(&chi2_rank(&data, bins)?, k);
            let data = data.select_features(&sel.retained).map_err(|e| {
                ClassifyError::Selection(SelectionError::Export(e.to_string()))
            })?;
            let name = format!("{}-{}", codes[a], codes[b]);
            Ok(evaluate_group(&name, &data, protocol, hp)?.acc_avg)
        })
        .collect::<Result<_, ClassifyError>>()?;
    let mut acc = vec![vec![None; codes.len()]; codes.len()];
    for (&(a, b), s) in pairs.iter().zip(scores) {
        acc[a][b] = Some(s);
        acc[b][a] = Some(s);
    }
    Ok(HeatmapGrid { codes: codes.to_vec(), acc })
}
