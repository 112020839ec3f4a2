//! Per-feature group contrasts: D'Agostino K² normality gate, then one-way
//! ANOVA or Kruskal-Wallis H.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};
use thiserror::Error;

use crate::matrix::Dataset;

pub const NORMALITY_ALPHA: f64 = 0.05;
/// Smallest sample the skewness test accepts.
pub const MIN_NORMALITY_N: usize = 8;
pub const MIN_GROUP_SIZE: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("group `{group}` has {size} values; at least {min} are needed")]
    GroupTooSmall { group: String, size: usize, min: usize },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("non-finite value in group `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: (f64, f64),
}

fn chi2_sf(x: f64, df: f64) -> f64 {
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Midranks (1-based) of `values`, plus the tie-correction sum Σ(t³ − t).
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H with tie correction and its χ²(k − 1) p-value. When every
/// value is tied, H = 0 and p = 1.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> TestResult {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let df = (groups.len() as f64 - 1.0, 0.0);
    let (ranks, ties) = midranks(&all);
    let correction = 1.0 - ties / (n * n * n - n);
    if correction <= 0.0 || !correction.is_finite() {
        return TestResult { statistic: 0.0, p_value: 1.0, df };
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
    let h = h.max(0.0);
    TestResult { statistic: h, p_value: chi2_sf(h, df.0), df }
}

/// One-way ANOVA F and its F(k − 1, N − k) p-value. Groups with no spread at
/// all give F = 0, p = 1; no within-group spread but distinct means gives
/// F = ∞, p = 0.
pub fn one_way_anova(groups: &[Vec<f64>]) -> TestResult {
    let k = groups.len() as f64;
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let grand = mean(&all);
    let ssb: f64 = groups.iter().map(|g| g.len() as f64 * (mean(g) - grand).powi(2)).sum();
    let ssw: f64 = groups.iter().map(|g| {
        let m = mean(g);
        g.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    }).sum();
    let df = (k - 1.0, n - k);
    if ssw == 0.0 {
        return if ssb == 0.0 {
            TestResult { statistic: 0.0, p_value: 1.0, df }
        } else {
            TestResult { statistic: f64::INFINITY, p_value: 0.0, df }
        };
    }
    let f = (ssb / df.0) / (ssw / df.1);
    let p = FisherSnedecor::new(df.0, df.1).map(|d| d.sf(f)).unwrap_or(f64::NAN).clamp(0.0, 1.0);
    TestResult { statistic: f, p_value: p, df }
}

/// D'Agostino-Pearson K² omnibus normality test (skewness and kurtosis z
/// scores). `None` when the sample is smaller than [`MIN_NORMALITY_N`] or
/// has no spread.
pub fn dagostino_k2(values: &[f64]) -> Option<TestResult> {
    let n = values.len();
    if n < MIN_NORMALITY_N {
        return None;
    }
    let m = mean(values);
    let moment = |k: i32| values.iter().map(|v| (v - m).powi(k)).sum::<f64>() / n as f64;
    let m2 = moment(2);
    if m2 <= 0.0 {
        return None;
    }
    let nf = n as f64;
    let skew = moment(3) / m2.powf(1.5);
    let kurt = moment(4) / (m2 * m2);

    let mut y = skew * ((nf + 1.0) * (nf + 3.0) / (6.0 * (nf - 2.0))).sqrt();
    let beta2 = 3.0 * (nf * nf + 27.0 * nf - 70.0) * (nf + 1.0) * (nf + 3.0)
        / ((nf - 2.0) * (nf + 5.0) * (nf + 7.0) * (nf + 9.0));
    let w2 = -1.0 + (2.0 * (beta2 - 1.0)).sqrt();
    let delta = 1.0 / (0.5 * w2.ln()).sqrt();
    let alpha = (2.0 / (w2 - 1.0)).sqrt();
    if y == 0.0 {
        y = 1.0;
    }
    let zs = delta * (y / alpha + ((y / alpha).powi(2) + 1.0).sqrt()).ln();

    let e = 3.0 * (nf - 1.0) / (nf + 1.0);
    let var_b2 = 24.0 * nf * (nf - 2.0) * (nf - 3.0) / ((nf + 1.0).powi(2) * (nf + 3.0) * (nf + 5.0));
    let x = (kurt - e) / var_b2.sqrt();
    let sqrt_beta1 = 6.0 * (nf * nf - 5.0 * nf + 2.0) / ((nf + 7.0) * (nf + 9.0))
        * (6.0 * (nf + 3.0) * (nf + 5.0) / (nf * (nf - 2.0) * (nf - 3.0))).sqrt();
    let a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + (1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)).sqrt());
    let term1 = 1.0 - 2.0 / (9.0 * a);
    let denom = 1.0 + x * (2.0 / (a - 4.0)).sqrt();
    if denom == 0.0 {
        return None;
    }
    let term2 = denom.signum() * ((1.0 - 2.0 / a) / denom.abs()).cbrt();
    let zk = (term1 - term2) / (2.0 / (9.0 * a)).sqrt();

    let k2 = zs * zs + zk * zk;
    Some(TestResult { statistic: k2, p_value: chi2_sf(k2, 2.0), df: (2.0, 0.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContrastTest {
    Anova,
    KruskalWallis,
}

impl ContrastTest {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContrastTest::Anova => "ANOVA",
            ContrastTest::KruskalWallis => "Kruskal-Wallis",
        }
    }

    /// Conventional symbol of the statistic.
    pub fn statistic_name(&self) -> &'static str {
        match self {
            ContrastTest::Anova => "F",
            ContrastTest::KruskalWallis => "H",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// K² normality test, absent when the group is too small to test.
    pub normality: Option<TestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastResult {
    pub feature: String,
    pub test: ContrastTest,
    pub statistic: f64,
    pub p_value: f64,
    pub groups: Vec<GroupSummary>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(group: &str, values: &[f64]) -> GroupSummary {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let m = mean(values);
    GroupSummary {
        group: group.into(),
        n: values.len(),
        mean: m,
        std: (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64).sqrt(),
        min: s[0],
        q1: quantile(&s, 0.25),
        median: quantile(&s, 0.5),
        q3: quantile(&s, 0.75),
        max: s[s.len() - 1],
        normality: dagostino_k2(values),
    }
}

/// Contrast of raw samples: ANOVA when every group passes the normality gate
/// at [`NORMALITY_ALPHA`], Kruskal-Wallis otherwise (including groups too
/// small to test).
pub fn contrast_groups(feature: &str, names: &[String], groups: &[Vec<f64>]) -> Result<ContrastResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for (name, g) in names.iter().zip(groups) {
        if g.len() < MIN_GROUP_SIZE {
            return Err(StatsError::GroupTooSmall { group: name.clone(), size: g.len(), min: MIN_GROUP_SIZE });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(name.clone()));
        }
    }
    let summaries: Vec<GroupSummary> = names.iter().zip(groups).map(|(n, g)| summarize(n, g)).collect();
    let normal = summaries.iter().all(|s| s.normality.is_some_and(|t| t.p_value >= NORMALITY_ALPHA));
    let (test, r) = if normal {
        (ContrastTest::Anova, one_way_anova(groups))
    } else {
        (ContrastTest::KruskalWallis, kruskal_wallis(groups))
    };
    Ok(ContrastResult { feature: feature.into(), test, statistic: r.statistic, p_value: r.p_value, groups: summaries })
}

/// Contrast of one feature across the classes of `data`.
pub fn contrast_feature(data: &Dataset, feature: &str) -> Result<ContrastResult, StatsError> {
    let j = data
        .feature_names
        .iter()
        .position(|f| f == feature)
        .ok_or_else(|| StatsError::UnknownFeature(feature.into()))?;
    let mut groups = vec![Vec::new(); data.n_classes()];
    for (r, &c) in data.x.iter().zip(&data.y) {
        groups[c].push(r[j]);
    }
    contrast_groups(feature, &data.class_names, &groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups_give_zero_h() {
        let g = vec![vec![1.0, 2.0, 3.0]; 3];
        let r = kruskal_wallis(&g);
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let tied = vec![vec![4.0; 3]; 2];
        assert_eq!(kruskal_wallis(&tied).statistic, 0.0);
        assert_eq!(kruskal_wallis(&tied).p_value, 1.0);
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn small_groups_rejected() {
        let names = vec!["a".to_string(), "b".to_string()];
        let err = contrast_groups("f", &names, &[vec![1.0, 2.0], vec![1.0, 2.0, 3.0]]).unwrap_err();
        assert!(matches!(err, StatsError::GroupTooSmall { .. }));
    }

    #[test]
    fn quantiles_interpolate() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.5), 2.5);
        assert_eq!(quantile(&s, 0.25), 1.75);
    }
}
