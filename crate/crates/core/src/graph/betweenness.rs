use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;

use super::UndirectedGraph;

/// Sources are split into this many fixed chunks; partial sums are merged in
/// chunk order so the result does not depend on the thread count.
const CHUNKS: usize = 16;

/// Edge betweenness of the undirected view, keyed by `(u, v)` with `u < v`.
///
/// Every unordered node pair contributes one unit spread over its shortest
/// paths.
pub fn edge_betweenness(graph: &UndirectedGraph) -> BTreeMap<(usize, usize), f64> {
    let alive = vec![true; graph.edge_count()];
    let sources: Vec<usize> = (0..graph.node_count()).collect();
    let mut scores = vec![0.0; graph.edge_count()];
    accumulate(graph, &alive, &sources, &mut scores);
    graph.edges().iter().copied().zip(scores).collect()
}

/// Add the betweenness contributed by paths starting at `sources` to
/// `scores`, halved so that a full sweep over a component counts each pair
/// once. Dead edges are ignored.
pub(crate) fn accumulate(
    graph: &UndirectedGraph,
    alive: &[bool],
    sources: &[usize],
    scores: &mut [f64],
) {
    let chunk_len = sources.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut ws = Workspace::new(graph.node_count());
            let mut local = vec![0.0; graph.edge_count()];
            for &s in chunk {
                ws.single_source(graph, alive, s, &mut local);
            }
            local
        })
        .collect();
    for part in partials {
        for (score, c) in scores.iter_mut().zip(part) {
            *score += c / 2.0;
        }
    }
}

struct Workspace {
    dist: Vec<i64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    preds: Vec<Vec<(usize, usize)>>,
    order: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            preds: vec![Vec::new(); n],
            order: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    /// Brandes accumulation for one source.
    fn single_source(
        &mut self,
        graph: &UndirectedGraph,
        alive: &[bool],
        s: usize,
        out: &mut [f64],
    ) {
        let adj = graph.adjacency();
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &(w, e) in &adj[v] {
                if !alive[e] {
                    continue;
                }
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push((v, e));
                }
            }
        }
        while let Some(w) = self.order.pop() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for i in 0..self.preds[w].len() {
                let (v, e) = self.preds[w][i];
                let c = self.sigma[v] * coeff;
                out[e] += c;
                self.delta[v] += c;
            }
            self.dist[w] = -1;
            self.sigma[w] = 0.0;
            self.delta[w] = 0.0;
            self.preds[w].clear();
        }
    }
}
