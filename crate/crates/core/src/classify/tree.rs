//! CART decision trees (Gini impurity) and bagged random forests.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{derive_seed, Hyperparameters, Model};

enum Node {
    Leaf(usize),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

pub(crate) struct DecisionTree {
    nodes: Vec<Node>,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    k: usize,
    max_depth: Option<usize>,
    min_split: usize,
    /// Features examined per split; `None` means all.
    mtry: Option<usize>,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

impl Builder<'_> {
    /// Best split of `idx` on feature `f`: (weighted impurity, threshold).
    fn best_split_on(&self, idx: &[usize], f: usize) -> Option<(f64, f64)> {
        let mut pairs: Vec<(f64, usize)> = idx.iter().map(|&i| (self.x[i][f], self.y[i])).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        let mut right = vec![0usize; self.k];
        for &(_, c) in &pairs {
            right[c] += 1;
        }
        let mut left = vec![0usize; self.k];
        let mut best: Option<(f64, f64)> = None;
        for s in 1..n {
            let c = pairs[s - 1].1;
            left[c] += 1;
            right[c] -= 1;
            let (a, b) = (pairs[s - 1].0, pairs[s].0);
            if a == b {
                continue;
            }
            let imp = (s as f64 * gini(&left, s) + (n - s) as f64 * gini(&right, n - s)) / n as f64;
            if best.is_none_or(|(bi, _)| imp < bi) {
                let mut thr = a + (b - a) / 2.0;
                if thr >= b {
                    thr = a;
                }
                best = Some((imp, thr));
            }
        }
        best
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let mut counts = vec![0usize; self.k];
        for &i in &idx {
            counts[self.y[i]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_hit = self.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_hit || idx.len() < self.min_split {
            return self.leaf(majority(&counts));
        }
        let p = self.x[0].len();
        let mut features: Vec<usize> = (0..p).collect();
        let limit = match self.mtry {
            Some(m) => {
                features.shuffle(&mut self.rng);
                m.min(p)
            }
            None => p,
        };
        let mut best: Option<(f64, usize, f64)> = None;
        for (tried, &f) in features.iter().enumerate() {
            // keep drawing features past `limit` only while no valid split exists
            if tried >= limit && best.is_some() {
                break;
            }
            if let Some((imp, thr)) = self.best_split_on(&idx, f) {
                if best.is_none_or(|(bi, _, _)| imp < bi) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return self.leaf(majority(&counts));
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0));
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    fn leaf(&mut self, class: usize) -> usize {
        self.nodes.push(Node::Leaf(class));
        self.nodes.len() - 1
    }
}

impl DecisionTree {
    fn grow(x: &[Vec<f64>], y: &[usize], idx: Vec<usize>, k: usize, hp: &Hyperparameters, mtry: Option<usize>, seed: u64) -> Self {
        let mut b = Builder {
            x,
            y,
            k,
            max_depth: hp.tree_max_depth,
            min_split: hp.tree_min_split,
            mtry,
            rng: ChaCha8Rng::seed_from_u64(seed),
            nodes: Vec::new(),
        };
        let root = b.build(idx, 0);
        debug_assert_eq!(root, 0);
        DecisionTree { nodes: b.nodes }
    }

    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], k: usize, hp: &Hyperparameters, seed: u64) -> Self {
        Self::grow(x, y, (0..x.len()).collect(), k, hp, None, seed)
    }
}

impl Model for DecisionTree {
    fn predict(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(c) => return c,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

pub(crate) struct RandomForest {
    trees: Vec<DecisionTree>,
    k: usize,
}

impl RandomForest {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], k: usize, hp: &Hyperparameters, seed: u64) -> Self {
        let n = x.len();
        let mtry = ((x[0].len() as f64).sqrt().floor() as usize).max(1);
        let trees = (0..hp.forest_trees)
            .into_par_iter()
            .map(|t| {
                let tree_seed = derive_seed(seed, t as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
                let idx: Vec<usize> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..n)).collect();
                DecisionTree::grow(x, y, idx, k, hp, Some(mtry), derive_seed(tree_seed, 1))
            })
            .collect();
        RandomForest { trees, k }
    }
}

impl Model for RandomForest {
    fn predict(&self, x: &[f64]) -> usize {
        let mut votes = vec![0usize; self.k];
        for t in &self.trees {
            votes[t.predict(x)] += 1;
        }
        majority(&votes)
    }
}
