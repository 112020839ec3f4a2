//! Gaussian naive Bayes, softmax logistic regression and a linear SVM.

use super::{Hyperparameters, Model};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

pub(crate) struct GaussianNb {
    log_prior: Vec<f64>,
    mean: Vec<Vec<f64>>,
    var: Vec<Vec<f64>>,
}

impl GaussianNb {
    /// The variance floor is relative: `var_floor` times the largest
    /// per-feature variance of the training data.
    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], k: usize, hp: &Hyperparameters) -> Self {
        let n = x.len();
        let p = x[0].len();
        let overall_max_var = (0..p)
            .map(|j| {
                let m = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
                x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n as f64
            })
            .fold(0.0, f64::max);
        let eps = hp.nb_var_floor * overall_max_var.max(1.0e-300);
        let mut count = vec![0usize; k];
        let mut mean = vec![vec![0.0; p]; k];
        for (r, &c) in x.iter().zip(y) {
            count[c] += 1;
            for j in 0..p {
                mean[c][j] += r[j];
            }
        }
        for c in 0..k {
            for v in &mut mean[c] {
                *v /= count[c].max(1) as f64;
            }
        }
        let mut var = vec![vec![0.0; p]; k];
        for (r, &c) in x.iter().zip(y) {
            for j in 0..p {
                var[c][j] += (r[j] - mean[c][j]).powi(2);
            }
        }
        for c in 0..k {
            for v in &mut var[c] {
                *v = *v / count[c].max(1) as f64 + eps;
            }
        }
        let log_prior = count.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
        GaussianNb { log_prior, mean, var }
    }
}

impl Model for GaussianNb {
    fn predict(&self, x: &[f64]) -> usize {
        let scores: Vec<f64> = (0..self.log_prior.len())
            .map(|c| {
                let ll: f64 = x
                    .iter()
                    .zip(&self.mean[c])
                    .zip(&self.var[c])
                    .map(|((&v, &m), &s)| -0.5 * ((2.0 * std::f64::consts::PI * s).ln() + (v - m).powi(2) / s))
                    .sum();
                self.log_prior[c] + ll
            })
            .collect();
        argmax(&scores)
    }
}

/// Largest eigenvalue of `XᵀX / n` for rows augmented with a constant 1.
fn gram_spectral_bound(x: &[Vec<f64>]) -> f64 {
    let n = x.len() as f64;
    let p = x[0].len() + 1;
    let mut v = vec![1.0 / (p as f64).sqrt(); p];
    let mut lambda = 0.0;
    for _ in 0..100 {
        let mut w = vec![0.0; p];
        for r in x {
            let s = dot(&r[..], &v[..p - 1]) + v[p - 1];
            for j in 0..p - 1 {
                w[j] += s * r[j];
            }
            w[p - 1] += s;
        }
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / n;
        for (a, b) in v.iter_mut().zip(&w) {
            *a = b / norm;
        }
        if (next - lambda).abs() <= 1e-9 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}

/// Multinomial logistic regression, L2 penalty on the weights (not the
/// intercepts), full-batch gradient descent with step `1 / L`.
pub(crate) struct LogisticRegression {
    /// One row per class: weights then intercept.
    w: Vec<Vec<f64>>,
}

impl LogisticRegression {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], k: usize, hp: &Hyperparameters) -> Self {
        let n = x.len() as f64;
        let p = x[0].len();
        let lipschitz = 0.5 * gram_spectral_bound(x) * 1.1 + hp.lr_lambda;
        let step = if lipschitz > 0.0 { 1.0 / lipschitz } else { 1.0 };
        let mut w = vec![vec![0.0; p + 1]; k];
        let mut prob = vec![0.0; k];
        for _ in 0..hp.lr_epochs {
            let mut grad = vec![vec![0.0; p + 1]; k];
            for (r, &c) in x.iter().zip(y) {
                softmax(&w, r, &mut prob);
                for (cls, g) in grad.iter_mut().enumerate() {
                    let d = prob[cls] - f64::from(u8::from(cls == c));
                    for j in 0..p {
                        g[j] += d * r[j];
                    }
                    g[p] += d;
                }
            }
            let mut max_g: f64 = 0.0;
            for (g, wc) in grad.iter_mut().zip(&w) {
                for j in 0..=p {
                    g[j] /= n;
                    if j < p {
                        g[j] += hp.lr_lambda * wc[j];
                    }
                    max_g = max_g.max(g[j].abs());
                }
            }
            for (wc, g) in w.iter_mut().zip(&grad) {
                for j in 0..=p {
                    wc[j] -= step * g[j];
                }
            }
            if max_g < hp.lr_tol {
                break;
            }
        }
        LogisticRegression { w }
    }
}

fn softmax(w: &[Vec<f64>], r: &[f64], out: &mut [f64]) {
    let p = r.len();
    for (o, wc) in out.iter_mut().zip(w) {
        *o = dot(&wc[..p], r) + wc[p];
    }
    let m = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for o in out.iter_mut() {
        *o = (*o - m).exp();
        s += *o;
    }
    for o in out.iter_mut() {
        *o /= s;
    }
}

impl Model for LogisticRegression {
    fn predict(&self, x: &[f64]) -> usize {
        let mut prob = vec![0.0; self.w.len()];
        softmax(&self.w, x, &mut prob);
        argmax(&prob)
    }
}

/// One-vs-rest linear SVM: L2-regularized mean hinge loss minimized by
/// full-batch subgradient descent with step `η₀ / √t`, keeping the iterate
/// with the lowest objective.
pub(crate) struct LinearSvm {
    w: Vec<Vec<f64>>,
}

impl LinearSvm {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], k: usize, hp: &Hyperparameters) -> Self {
        let machines = if k == 2 { 1 } else { k };
        let w = (0..machines)
            .map(|c| {
                // with two classes one machine separates class 1 from class 0
                let target = if k == 2 { 1 } else { c };
                let sign: Vec<f64> = y.iter().map(|&yi| if yi == target { 1.0 } else { -1.0 }).collect();
                fit_binary_svm(x, &sign, hp)
            })
            .collect();
        LinearSvm { w }
    }
}

fn fit_binary_svm(x: &[Vec<f64>], y: &[f64], hp: &Hyperparameters) -> Vec<f64> {
    let n = x.len() as f64;
    let p = x[0].len();
    let radius = x.iter().map(|r| (dot(r, r) + 1.0).sqrt()).fold(1.0, f64::max);
    let eta0 = 1.0 / radius;
    let objective = |w: &[f64]| {
        let reg = 0.5 * hp.svm_lambda * dot(&w[..p], &w[..p]);
        let hinge: f64 = x.iter().zip(y).map(|(r, &yi)| (1.0 - yi * (dot(&w[..p], r) + w[p])).max(0.0)).sum();
        reg + hinge / n
    };
    let mut w = vec![0.0; p + 1];
    let mut best = w.clone();
    let mut best_obj = objective(&w);
    for t in 1..=hp.svm_epochs {
        let mut g = vec![0.0; p + 1];
        for (r, &yi) in x.iter().zip(y) {
            if yi * (dot(&w[..p], r) + w[p]) < 1.0 {
                for j in 0..p {
                    g[j] -= yi * r[j];
                }
                g[p] -= yi;
            }
        }
        for j in 0..=p {
            g[j] /= n;
            if j < p {
                g[j] += hp.svm_lambda * w[j];
            }
        }
        let eta = eta0 / (t as f64).sqrt();
        for j in 0..=p {
            w[j] -= eta * g[j];
        }
        let obj = objective(&w);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&w);
        }
    }
    best
}

impl Model for LinearSvm {
    fn predict(&self, x: &[f64]) -> usize {
        let p = x.len();
        let scores: Vec<f64> = self.w.iter().map(|w| dot(&w[..p], x) + w[p]).collect();
        if scores.len() == 1 {
            usize::from(scores[0] > 0.0)
        } else {
            argmax(&scores)
        }
    }
}
