//! The directed retweet network and the algorithms run on it.
//!
//! An edge `a -> b` means account `a` retweeted account `b`; its weight is
//! the number of such retweets. Node indices follow the lexicographic order
//! of handles, so every index-based tie-break in this module is also a
//! handle-based one.
//!
//! PageRank uses direction and weights. Community detection works on the
//! [`UndirectedGraph`] view, which forgets both.

mod betweenness;
mod girvan_newman;
pub mod io;
mod modularity;
mod pagerank;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::corpus::RawTweet;

pub use betweenness::edge_betweenness;
pub use girvan_newman::{best_partition, girvan_newman};
pub use modularity::modularity;
pub use pagerank::{pagerank, select_leaders, PageRankConfig, PageRankVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetGraph {
    handles: Vec<String>,
    index: HashMap<String, usize>,
    /// Outgoing edges per node, sorted by target.
    out_edges: Vec<Vec<(usize, u64)>>,
    self_loops_dropped: usize,
}

impl RetweetGraph {
    /// Build from a node list and weighted edges given by handle. Parallel
    /// edges are summed, self-loops dropped and counted, and edge endpoints
    /// missing from `nodes` are added.
    pub fn from_edges<N, E, S>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S, u64)>,
        S: Into<String>,
    {
        let mut names: BTreeSet<String> = nodes.into_iter().map(Into::into).collect();
        let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
        let mut self_loops = 0;
        for (src, dst, w) in edges {
            let (src, dst) = (src.into(), dst.into());
            names.insert(src.clone());
            names.insert(dst.clone());
            if src == dst {
                self_loops += 1;
                continue;
            }
            if w > 0 {
                *weights.entry((src, dst)).or_default() += w;
            }
        }
        let handles: Vec<String> = names.into_iter().collect();
        let index: HashMap<String, usize> = handles
            .iter()
            .enumerate()
            .map(|(i, h)| (h.clone(), i))
            .collect();
        let mut out_edges = vec![Vec::new(); handles.len()];
        for ((src, dst), w) in weights {
            out_edges[index[&src]].push((index[&dst], w));
        }
        for list in &mut out_edges {
            list.sort_unstable();
        }
        RetweetGraph {
            handles,
            index,
            out_edges,
            self_loops_dropped: self_loops,
        }
    }

    pub fn node_count(&self) -> usize {
        self.handles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.handles.is_empty()
    }

    pub fn handles(&self) -> &[String] {
        &self.handles
    }

    pub fn handle(&self, node: usize) -> &str {
        &self.handles[node]
    }

    pub fn index_of(&self, handle: &str) -> Option<usize> {
        self.index.get(handle).copied()
    }

    pub fn out_edges(&self, node: usize) -> &[(usize, u64)] {
        &self.out_edges[node]
    }

    /// All edges as `(src, dst, weight)` in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(s, list)| list.iter().map(move |&(d, w)| (s, d, w)))
    }

    pub fn edge_weight(&self, src: &str, dst: &str) -> Option<u64> {
        let (s, d) = (self.index_of(src)?, self.index_of(dst)?);
        self.out_edges[s]
            .binary_search_by_key(&d, |&(t, _)| t)
            .ok()
            .map(|i| self.out_edges[s][i].1)
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    /// Subgraph on the given nodes and the edges among them.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> RetweetGraph {
        let keep: BTreeSet<usize> = nodes.iter().copied().collect();
        let names = keep.iter().map(|&i| self.handles[i].clone());
        let edges: Vec<(String, String, u64)> = self
            .edges()
            .filter(|(s, d, _)| keep.contains(s) && keep.contains(d))
            .map(|(s, d, w)| (self.handles[s].clone(), self.handles[d].clone(), w))
            .collect();
        RetweetGraph::from_edges(names.collect::<Vec<_>>(), edges)
    }

    /// Undirected, unweighted view used for community detection.
    pub fn undirected(&self) -> UndirectedGraph {
        UndirectedGraph::new(self.node_count(), self.edges().map(|(s, d, _)| (s, d)))
    }
}

/// Collapse retweet records into the weighted retweet network. Every
/// author and retweeted account becomes a node, even without edges.
pub fn build_retweet_graph(tweets: &[RawTweet]) -> RetweetGraph {
    let nodes = tweets
        .iter()
        .flat_map(|t| std::iter::once(t.author.as_str()).chain(t.retweeted_author.as_deref()));
    let edges = tweets.iter().filter_map(|t| {
        t.retweeted_author
            .as_deref()
            .map(|r| (t.author.as_str(), r, 1u64))
    });
    RetweetGraph::from_edges(nodes, edges)
}

/// Simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    /// Edges as `(u, v)` with `u < v`, sorted and deduplicated.
    edges: Vec<(usize, usize)>,
    /// Neighbour and edge id per node, sorted by neighbour.
    adj: Vec<Vec<(usize, usize)>>,
}

impl UndirectedGraph {
    /// Self-loops and duplicate edges (in either direction) are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let set: BTreeSet<(usize, usize)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| {
                assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
                (u.min(v), u.max(v))
            })
            .collect();
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        UndirectedGraph { n, edges, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[node].iter().map(|&(v, _)| v)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub(crate) fn adjacency(&self) -> &[Vec<(usize, usize)>] {
        &self.adj
    }

    /// Connected components, labelled in order of their smallest node.
    pub fn components(&self) -> Vec<usize> {
        components_with(self, |_| true)
    }
}

pub(crate) fn components_with(
    graph: &UndirectedGraph,
    alive: impl Fn(usize) -> bool,
) -> Vec<usize> {
    let mut label = vec![usize::MAX; graph.n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..graph.n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &graph.adj[u] {
                if alive(e) && label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

/// Assignment of every node to one community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Community id per node index, contiguous from 0.
    pub assignment: Vec<usize>,
    pub num_communities: usize,
    pub modularity: f64,
    /// Edges removed by Girvan–Newman before this partition appeared.
    pub removed_edges: usize,
}

impl CommunityPartition {
    /// Node indices grouped by community.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.num_communities];
        for (node, &c) in self.assignment.iter().enumerate() {
            groups[c].push(node);
        }
        groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rt(id: &str, author: &str, target: Option<&str>) -> RawTweet {
        RawTweet {
            id: id.into(),
            author: author.into(),
            created_at: "2020-02-01T00:00:00Z".parse().unwrap(),
            text: String::new(),
            retweeted_author: target.map(Into::into),
        }
    }

    #[test]
    fn parallel_retweets_collapse() {
        let g = build_retweet_graph(&[rt("1", "a", Some("b")), rt("2", "a", Some("b"))]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edge_weight("a", "b"), Some(2));
    }

    #[test]
    fn self_retweet_dropped() {
        let g = build_retweet_graph(&[rt("1", "a", Some("a"))]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.self_loops_dropped(), 1);
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn eight_tweet_fixture() {
        let tweets = vec![
            rt("1", "ann", None),
            rt("2", "bob", Some("who")),
            rt("3", "cat", None),
            rt("4", "bob", Some("who")),
            rt("5", "dan", None),
            rt("6", "cat", Some("cdc")),
            rt("7", "eve", None),
            rt("8", "who", None),
        ];
        let g = build_retweet_graph(&tweets);
        let mut weights: Vec<u64> = g.edges().map(|(_, _, w)| w).collect();
        weights.sort_unstable();
        assert_eq!(weights, vec![1, 2]);
        // isolated authors stay
        assert_eq!(g.node_count(), 7);
        assert!(g.index_of("ann").is_some());
    }

    #[test]
    fn indices_are_sorted_handles() {
        let g = RetweetGraph::from_edges(["zed", "amy"], [("mia", "amy", 1)]);
        assert_eq!(g.handles(), &["amy", "mia", "zed"]);
    }

    #[test]
    fn undirected_view_merges_directions() {
        let g = RetweetGraph::from_edges(Vec::<&str>::new(), [("a", "b", 3), ("b", "a", 1)]);
        let u = g.undirected();
        assert_eq!(u.edges(), &[(0, 1)]);
    }

    #[test]
    fn components_labelled_by_smallest_node() {
        let u = UndirectedGraph::new(5, [(3, 4), (0, 2)]);
        assert_eq!(u.components(), vec![0, 1, 0, 2, 2]);
    }
}
