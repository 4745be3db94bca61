use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::RetweetGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PageRankConfig {
    pub damping: f64,
    /// Stop once the L1 change between iterations drops below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRankVector {
    pub handles: Vec<String>,
    pub scores: Vec<f64>,
    pub damping: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

impl PageRankVector {
    pub fn score_of(&self, handle: &str) -> Option<f64> {
        self.handles
            .binary_search_by(|h| h.as_str().cmp(handle))
            .ok()
            .map(|i| self.scores[i])
    }

    /// Node indices by descending score, ties by handle.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.scores[b]
                .partial_cmp(&self.scores[a])
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.handles[a].cmp(&self.handles[b]))
        });
        order
    }
}

/// Power iteration on the weighted retweet network.
///
/// Each node passes its mass to retweeted accounts in proportion to edge
/// weight; nodes with no outgoing edges spread theirs uniformly. A result is
/// returned even when `max_iter` is hit, with `converged` set to false.
pub fn pagerank(graph: &RetweetGraph, config: &PageRankConfig) -> Result<PageRankVector> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if !(config.damping > 0.0 && config.damping < 1.0) {
        return Err(Error::invalid(format!(
            "damping must lie in (0, 1), got {}",
            config.damping
        )));
    }
    let d = config.damping;
    let nf = n as f64;
    let out_weight: Vec<f64> = (0..n)
        .map(|i| graph.out_edges(i).iter().map(|&(_, w)| w as f64).sum())
        .collect();

    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        iterations += 1;
        let dangling: f64 = (0..n)
            .filter(|&i| out_weight[i] == 0.0)
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for i in 0..n {
            if out_weight[i] == 0.0 {
                continue;
            }
            let share = d * scores[i] / out_weight[i];
            for &(j, w) in graph.out_edges(i) {
                next[j] += share * w as f64;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let change: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if change < config.tol {
            converged = true;
            break;
        }
    }

    Ok(PageRankVector {
        handles: graph.handles().to_vec(),
        scores,
        damping: d,
        iterations_used: iterations,
        converged,
    })
}

/// The `n` highest-ranked handles, best first. Asking for more than the
/// node count returns every node.
pub fn select_leaders(pr: &PageRankVector, n: usize) -> Vec<String> {
    pr.ranking()
        .into_iter()
        .take(n)
        .map(|i| pr.handles[i].clone())
        .collect()
}
