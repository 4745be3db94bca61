use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Version written into model dumps.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Features tried per split; `None` means the square root of the count.
    pub max_features: Option<usize>,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            max_features: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go to `left`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class distribution of the training rows that reached the leaf.
    Leaf { proba: Vec<f64> },
}

/// Nodes in creation order; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    fn leaf_for(&self, row: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf { proba } => return proba,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub n_classes: usize,
    pub n_features: usize,
    pub config: ForestConfig,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Mean of the per-tree leaf distributions, one row per input row.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<Vec<f64>>> {
        if x.cols() != self.n_features {
            return Err(Error::invalid(format!(
                "model expects {} features, got {}",
                self.n_features,
                x.cols()
            )));
        }
        let n = self.trees.len() as f64;
        Ok((0..x.rows())
            .map(|i| {
                let row = x.row(i);
                let mut p = vec![0.0; self.n_classes];
                for t in &self.trees {
                    for (a, b) in p.iter_mut().zip(t.leaf_for(row)) {
                        *a += b;
                    }
                }
                p.iter_mut().for_each(|v| *v /= n);
                p
            })
            .collect())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: ForestModel = serde_json::from_str(&text)?;
        if model.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }
}

/// Train a random forest on rows of `x` with class labels `y`.
pub fn train_random_forest(x: &Matrix, y: &[usize], config: &ForestConfig) -> Result<ForestModel> {
    if x.rows() != y.len() {
        return Err(Error::RowMismatch(format!(
            "{} rows, {} labels",
            x.rows(),
            y.len()
        )));
    }
    if config.n_trees == 0 || config.min_leaf == 0 {
        return Err(Error::invalid("n_trees and min_leaf must be positive"));
    }
    let n_classes = y.iter().max().map_or(0, |&m| m + 1);
    let mut present = vec![false; n_classes];
    y.iter().for_each(|&c| present[c] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::SingleClass);
    }
    let f = x.cols();
    let m = config
        .max_features
        .unwrap_or_else(|| (f as f64).sqrt().round() as usize)
        .clamp(1, f.max(1));

    let data = TrainData {
        cols: x.columns(),
        y,
        n_classes,
        max_features: m,
        min_leaf: config.min_leaf,
        max_depth: config.max_depth.unwrap_or(usize::MAX),
    };
    let mut seeder = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.n_trees).map(|_| seeder.gen()).collect();
    let trees = seeds.par_iter().map(|&s| data.grow(s)).collect();
    Ok(ForestModel {
        format_version: FORMAT_VERSION,
        n_classes,
        n_features: f,
        config: *config,
        trees,
    })
}

struct TrainData<'a> {
    cols: Vec<Vec<f64>>,
    y: &'a [usize],
    n_classes: usize,
    max_features: usize,
    min_leaf: usize,
    max_depth: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

/// Scratch buffers reused across nodes.
#[derive(Default)]
struct Scratch {
    values: Vec<(f64, usize)>,
    zero_counts: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl TrainData<'_> {
    fn grow(&self, seed: u64) -> Tree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.y.len();
        let mut idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut features: Vec<usize> = (0..self.cols.len()).collect();
        let mut nodes = vec![Node::Leaf { proba: Vec::new() }];
        let mut scratch = Scratch::default();
        // (node id, start, end, depth) over `idx`
        let mut stack = vec![(0usize, 0usize, n, 0usize)];
        while let Some((id, start, end, depth)) = stack.pop() {
            let rows = &idx[start..end];
            let counts = self.class_counts(rows);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let split = if pure || depth >= self.max_depth || rows.len() < 2 * self.min_leaf {
                None
            } else {
                self.best_split(rows, &counts, &mut features, &mut rng, &mut scratch)
            };
            let Some(split) = split else {
                let total = rows.len() as f64;
                nodes[id] = Node::Leaf {
                    proba: counts.iter().map(|&c| c as f64 / total).collect(),
                };
                continue;
            };
            let col = &self.cols[split.feature];
            let slice = &mut idx[start..end];
            let mut mid = 0;
            for i in 0..slice.len() {
                if col[slice[i]] <= split.threshold {
                    slice.swap(i, mid);
                    mid += 1;
                }
            }
            let (left, right) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node::Leaf { proba: Vec::new() });
            nodes.push(Node::Leaf { proba: Vec::new() });
            nodes[id] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            stack.push((right, start + mid, end, depth + 1));
            stack.push((left, start, start + mid, depth + 1));
        }
        Tree { nodes }
    }

    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        rows.iter().for_each(|&r| c[self.y[r]] += 1);
        c
    }

    /// Draw features in random order until `max_features` non-constant ones
    /// have been scored; keep the best Gini split among them.
    fn best_split(
        &self,
        rows: &[usize],
        counts: &[usize],
        features: &mut [usize],
        rng: &mut ChaCha8Rng,
        scratch: &mut Scratch,
    ) -> Option<Split> {
        features.shuffle(rng);
        let mut best: Option<Split> = None;
        let mut scored = 0;
        for &f in features.iter() {
            if scored == self.max_features {
                break;
            }
            if let Some(s) = self.split_on(f, rows, counts, scratch) {
                scored += 1;
                if best.as_ref().is_none_or(|b| s.score > b.score) {
                    best = Some(s);
                }
            }
        }
        best
    }

    /// Best threshold on one feature, or `None` when the feature is
    /// constant on these rows or no split respects `min_leaf`. The score is
    /// `sum_c L_c^2 / |L| + sum_c R_c^2 / |R|`, which grows as the weighted
    /// Gini impurity falls.
    fn split_on(
        &self,
        f: usize,
        rows: &[usize],
        counts: &[usize],
        s: &mut Scratch,
    ) -> Option<Split> {
        let col = &self.cols[f];
        s.values.clear();
        s.zero_counts.clear();
        s.zero_counts.resize(self.n_classes, 0);
        for &r in rows {
            let v = col[r];
            if v == 0.0 {
                s.zero_counts[self.y[r]] += 1;
            } else {
                s.values.push((v, self.y[r]));
            }
        }
        let zeros = rows.len() - s.values.len();
        if s.values.is_empty() {
            return None;
        }
        s.values.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        if zeros == 0 && s.values[0].0 == s.values[s.values.len() - 1].0 {
            return None;
        }
        let neg = s.values.partition_point(|v| v.0 < 0.0);

        s.left.clear();
        s.left.resize(self.n_classes, 0);
        s.right.clear();
        s.right.extend_from_slice(counts);
        let mut sq_l = 0.0;
        let mut sq_r: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
        let mut n_l = 0usize;
        let n = rows.len();
        let mut best: Option<Split> = None;

        // walk groups of equal values in ascending order, zeros in place
        let mut prev: Option<f64> = None;
        let mut i = 0;
        let mut zeros_done = zeros == 0;
        loop {
            let (value, take_zeros) = if !zeros_done && i == neg {
                (0.0, true)
            } else if i < s.values.len() {
                (s.values[i].0, false)
            } else {
                break;
            };
            if let Some(p) = prev {
                if n_l >= self.min_leaf && n - n_l >= self.min_leaf {
                    let score = sq_l / n_l as f64 + sq_r / (n - n_l) as f64;
                    if best.as_ref().is_none_or(|b| score > b.score) {
                        let mut t = p + (value - p) / 2.0;
                        if t >= value {
                            t = p;
                        }
                        best = Some(Split {
                            feature: f,
                            threshold: t,
                            score,
                        });
                    }
                }
            }
            if take_zeros {
                for c in 0..self.n_classes {
                    let k = s.zero_counts[c];
                    if k > 0 {
                        let (l, r) = (s.left[c] as f64, s.right[c] as f64);
                        sq_l += (l + k as f64).powi(2) - l * l;
                        sq_r += (r - k as f64).powi(2) - r * r;
                        s.left[c] += k;
                        s.right[c] -= k;
                    }
                }
                n_l += zeros;
                zeros_done = true;
            } else {
                while i < s.values.len() && s.values[i].0 == value {
                    let c = s.values[i].1;
                    sq_l += 2.0 * s.left[c] as f64 + 1.0;
                    sq_r -= 2.0 * s.right[c] as f64 - 1.0;
                    s.left[c] += 1;
                    s.right[c] -= 1;
                    n_l += 1;
                    i += 1;
                }
            }
            prev = Some(value);
        }
        best
    }
}
