//! Independent reference implementations shared by the oracle tests and the
//! acceptance runner. They favour obviousness over speed.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Quantile bin by brute force: the midrank of `values[i]` is the number of
/// strictly smaller values plus half the size of its tie block plus one half.
pub fn brute_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            let midrank = less + (equal + 1.0) / 2.0;
            (((midrank - 0.5) * bins as f64 / n as f64).floor() as usize).min(bins - 1)
        })
        .collect()
}

/// Pearson χ² of binned values against labels, via `N (Σ O²/(R C) - 1)` on
/// the non-empty rows and columns.
pub fn brute_chi2(values: &[f64], y: &[usize], n_classes: usize, bins: usize) -> f64 {
    let b = brute_bins(values, bins);
    let n = values.len() as f64;
    let mut table = vec![vec![0.0f64; n_classes]; bins];
    for (&bin, &c) in b.iter().zip(y) {
        table[bin][c] += 1.0;
    }
    let row: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..n_classes).map(|c| table.iter().map(|r| r[c]).sum()).collect();
    if row.iter().filter(|&&r| r > 0.0).count() < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (c, &o) in r.iter().enumerate() {
            if row[i] > 0.0 && col[c] > 0.0 {
                s += o * o / (row[i] * col[c]);
            }
        }
    }
    n * (s - 1.0)
}

/// ARI from the four pair counts: `2(ad - bc) / ((a+b)(b+d) + (a+c)(c+d))`.
pub fn pair_ari(p: &[usize], t: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0.0f64, 0.0, 0.0, 0.0);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            match (p[i] == p[j], t[i] == t[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let den = (a + b) * (b + d) + (a + c) * (c + d);
    if den == 0.0 {
        1.0
    } else {
        2.0 * (a * d - b * c) / den
    }
}

/// `n` points per class with independent N(mean, 1) coordinates.
pub fn gaussian_classes(means: &[f64], n: usize, dims: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (c, &m) in means.iter().enumerate() {
        let dist = Normal::new(m, 1.0).unwrap();
        for _ in 0..n {
            x.push((0..dims).map(|_| dist.sample(&mut rng)).collect());
            y.push(c);
        }
    }
    (x, y)
}

pub fn uniform_matrix(rows: usize, cols: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rows).map(|_| (0..cols).map(|_| rng.gen::<f64>()).collect()).collect()
}

pub fn random_partition(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

/// Kruskal-Wallis fixture with ties; ranks assigned by hand.
///
/// Pooled sorted values: 1 | 2 2 2 | 3 | 4 4 4 | 5 | 6 | 7 with midranks
/// 1 | 3 3 3 | 5 | 7 7 7 | 9 | 10 | 11.
pub const KW_GROUPS: [&[f64]; 3] = [&[1.0, 2.0, 2.0, 4.0], &[2.0, 3.0, 5.0], &[4.0, 4.0, 6.0, 7.0]];
pub const KW_RANKS: [&[f64]; 3] = [&[1.0, 3.0, 3.0, 7.0], &[3.0, 5.0, 9.0], &[7.0, 7.0, 10.0, 11.0]];
/// Tie blocks of sizes 3 (value 2) and 3 (value 4).
pub const KW_TIES: [f64; 2] = [3.0, 3.0];

/// H with tie correction computed from the hand ranks.
pub fn hand_kruskal() -> f64 {
    let n: f64 = KW_RANKS.iter().map(|g| g.len() as f64).sum();
    let s: f64 = KW_RANKS.iter().map(|g| g.iter().sum::<f64>().powi(2) / g.len() as f64).sum();
    let h = 12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0);
    let ties: f64 = KW_TIES.iter().map(|t| t * t * t - t).sum();
    h / (1.0 - ties / (n * n * n - n))
}

/// Pooled-variance two-sample t statistic.
pub fn pooled_t(a: &[f64], b: &[f64]) -> f64 {
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sp2 = (ss(a, ma) + ss(b, mb)) / (na + nb - 2.0);
    (ma - mb) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt()
}
