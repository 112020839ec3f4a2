//! Chi-square feature ranking over quantile-binned features, top-k retention.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::matrix::Dataset;

pub const DEFAULT_BINS: usize = 10;
pub const DEFAULT_K: usize = 30;

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("need at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("need at least 2 classes with documents, got {0}")]
    TooFewClasses(usize),
    #[error("class `{0}` has no documents")]
    EmptyClass(String),
    #[error("too few documents ({0})")]
    TooFewDocs(usize),
    #[error("need at least 2 selection results to merge, got {0}")]
    TooFewResults(usize),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("selection export: {0}")]
    Export(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: String,
    pub chi2: f64,
    pub p_value: f64,
    /// Constant feature: a single non-empty bin, score 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub ranked: Vec<RankedFeature>,
    pub retained: Vec<String>,
}

/// Quantile bin of every value: ranks with ties averaged, then
/// `floor((rank - 0.5) * bins / n)`. Tied values always share a bin.
pub fn quantile_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // midrank of the tie block, 1-based
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        let bin = (((midrank - 0.5) * bins as f64 / n as f64).floor() as usize).min(bins - 1);
        for &k in &order[i..=j] {
            out[k] = bin;
        }
        i = j + 1;
    }
    out
}

/// Chi-square statistic of a contingency table given as `rows × cols` counts.
/// Rows and columns with zero marginal are dropped. Returns the statistic and
/// the degrees of freedom of the reduced table.
pub fn contingency_chi2(table: &[Vec<u64>]) -> (f64, usize) {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    if rows.is_empty() {
        return (0.0, 0);
    }
    let ncol = rows[0].len();
    let col_tot: Vec<u64> = (0..ncol).map(|c| rows.iter().map(|r| r[c]).sum()).collect();
    let cols: Vec<usize> = (0..ncol).filter(|&c| col_tot[c] > 0).collect();
    let total: u64 = col_tot.iter().sum();
    let mut chi2 = 0.0;
    for r in &rows {
        let row_tot: u64 = r.iter().sum();
        for &c in &cols {
            let e = row_tot as f64 * col_tot[c] as f64 / total as f64;
            let d = r[c] as f64 - e;
            chi2 += d * d / e;
        }
    }
    let df = (rows.len() - 1) * (cols.len().saturating_sub(1));
    (chi2, df)
}

fn score_feature(values: &[f64], y: &[usize], n_classes: usize, bins: usize) -> (f64, f64, bool) {
    let b = quantile_bins(values, bins);
    let mut table = vec![vec![0u64; n_classes]; bins];
    for (&bin, &c) in b.iter().zip(y) {
        table[bin][c] += 1;
    }
    let (chi2, df) = contingency_chi2(&table);
    if df == 0 {
        return (0.0, 1.0, true);
    }
    let p = ChiSquared::new(df as f64).map(|d| d.sf(chi2)).unwrap_or(f64::NAN);
    (chi2, p.clamp(0.0, 1.0), false)
}

/// Scores every feature of `data` and ranks by χ² descending; constant
/// features come last, ties are broken by name. `retained` holds the full
/// ranking; apply [`select_top_k`] to cut it.
pub fn chi2_rank(data: &Dataset, bins: usize) -> Result<SelectionResult, SelectionError> {
    if bins < 2 {
        return Err(SelectionError::TooFewBins(bins));
    }
    if data.len() < 2 {
        return Err(SelectionError::TooFewDocs(data.len()));
    }
    let counts = data.class_counts();
    if counts.len() < 2 {
        return Err(SelectionError::TooFewClasses(counts.len()));
    }
    if let Some(c) = counts.iter().position(|&c| c == 0) {
        return Err(SelectionError::EmptyClass(data.class_names[c].clone()));
    }
    let p = data.feature_names.len();
    let mut ranked: Vec<RankedFeature> = (0..p)
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = data.x.iter().map(|r| r[j]).collect();
            let (chi2, p_value, degenerate) = score_feature(&col, &data.y, data.n_classes(), bins);
            RankedFeature { feature: data.feature_names[j].clone(), chi2, p_value, degenerate }
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.degenerate
            .cmp(&b.degenerate)
            .then(b.chi2.total_cmp(&a.chi2))
            .then(a.feature.cmp(&b.feature))
    });
    let retained = ranked.iter().map(|r| r.feature.clone()).collect();
    Ok(SelectionResult { ranked, retained })
}

/// Keeps the first `min(k, |ranked|)` features.
pub fn select_top_k(result: &SelectionResult, k: usize) -> SelectionResult {
    if k == 0 {
        log::warn!("top-k selection with k = 0 retains no features");
    }
    SelectionResult {
        ranked: result.ranked.clone(),
        retained: result.ranked.iter().take(k).map(|r| r.feature.clone()).collect(),
    }
}

/// Deduplicated union of the retained sets, ordered by each feature's best
/// (smallest) rank across results, then by name.
pub fn shared_top_features(results: &[SelectionResult]) -> Result<Vec<String>, SelectionError> {
    if results.len() < 2 {
        return Err(SelectionError::TooFewResults(results.len()));
    }
    let mut best: BTreeMap<&str, usize> = BTreeMap::new();
    for r in results {
        for (rank, f) in r.retained.iter().enumerate() {
            let e = best.entry(f.as_str()).or_insert(rank);
            *e = (*e).min(rank);
        }
    }
    let mut out: Vec<(&str, usize)> = best.into_iter().collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(b.0)));
    Ok(out.into_iter().map(|(f, _)| f.to_string()).collect())
}

/// How the all-features run picks its features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum SelectionScope {
    /// One ranking over every feature.
    #[default]
    Pooled,
    /// Top-k inside each layer, concatenated in layer order.
    PerLayer,
}

/// Selection for a feature set made of named layers. With `Pooled` the layers
/// are ranked together; with `PerLayer` each layer keeps its own top `k`.
pub fn select_layers(
    data: &Dataset,
    layers: &[(String, Vec<String>)],
    scope: SelectionScope,
    k: usize,
    bins: usize,
) -> Result<SelectionResult, SelectionError> {
    let check = |names: &[String]| -> Result<Dataset, SelectionError> {
        data.select_features(names).map_err(|e| match e {
            crate::matrix::MatrixError::UnknownFeature(f) => SelectionError::UnknownFeature(f),
            other => SelectionError::Export(other.to_string()),
        })
    };
    match scope {
        SelectionScope::Pooled => {
            let all: Vec<String> = layers.iter().flat_map(|(_, f)| f.iter().cloned()).collect();
            Ok(select_top_k(&chi2_rank(&check(&all)?, bins)?, k))
        }
        SelectionScope::PerLayer => {
            let mut ranked = Vec::new();
            let mut retained = Vec::new();
            for (_, names) in layers.iter().filter(|(_, f)| !f.is_empty()) {
                let r = select_top_k(&chi2_rank(&check(names)?, bins)?, k);
                retained.extend(r.retained);
                ranked.extend(r.ranked);
            }
            Ok(SelectionResult { ranked, retained })
        }
    }
}

impl SelectionResult {
    /// CSV with `rank,feature,chi2,p,retained`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), SelectionError> {
        let err = |e: csv::Error| SelectionError::Export(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["rank", "feature", "chi2", "p", "retained"]).map_err(err)?;
        for (i, r) in self.ranked.iter().enumerate() {
            let kept = self.retained.contains(&r.feature);
            w.write_record([
                (i + 1).to_string(),
                r.feature.clone(),
                format!("{:?}", r.chi2),
                format!("{:?}", r.p_value),
                kept.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| SelectionError::Export(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_split_scores_one_hundred() {
        let x: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, 1.0]).collect();
        let y: Vec<usize> = (0..100).map(|i| usize::from(i >= 50)).collect();
        let r = chi2_rank(&Dataset::from_rows(x, y, 2), 2).unwrap();
        assert_eq!(r.ranked[0].feature, "f0");
        assert!((r.ranked[0].chi2 - 100.0).abs() < 1e-9);
        assert_eq!(r.ranked[1].chi2, 0.0);
        assert_eq!(r.ranked[1].p_value, 1.0);
        assert!(r.ranked[1].degenerate);
    }

    #[test]
    fn ties_share_a_bin() {
        assert_eq!(quantile_bins(&[1.0, 1.0, 1.0, 2.0], 2), vec![0, 0, 0, 1]);
        assert_eq!(quantile_bins(&[3.0, 1.0, 2.0, 4.0], 4), vec![2, 0, 1, 3]);
        assert_eq!(quantile_bins(&[5.0; 7], 10), vec![5; 7]);
    }

    #[test]
    fn top_k_and_shared() {
        let mk = |names: &[&str]| SelectionResult {
            ranked: names
                .iter()
                .map(|n| RankedFeature { feature: n.to_string(), chi2: 1.0, p_value: 0.5, degenerate: false })
                .collect(),
            retained: names.iter().map(|n| n.to_string()).collect(),
        };
        let r = mk(&["a", "b", "c"]);
        assert_eq!(select_top_k(&r, 2).retained, vec!["a", "b"]);
        assert_eq!(select_top_k(&r, 30).retained.len(), 3);
        assert!(select_top_k(&r, 0).retained.is_empty());
        let shared = shared_top_features(&[mk(&["a", "b"]), mk(&["c", "a"]), mk(&["b", "d"])]).unwrap();
        assert_eq!(shared, vec!["a", "b", "c", "d"]);
        assert!(shared_top_features(&[r]).is_err());
    }

    #[test]
    fn rejects_empty_class() {
        let d = Dataset::from_rows(vec![vec![1.0], vec![2.0]], vec![0, 0], 2);
        assert!(matches!(chi2_rank(&d, 2), Err(SelectionError::EmptyClass(_))));
    }
}
