use super::betweenness::accumulate;
use super::{components_with, modularity, CommunityPartition, UndirectedGraph};
use crate::error::{Error, Result};

/// Relative slack under which two betweenness values count as tied.
const TIE_EPS: f64 = 1e-9;

/// Divisive community detection.
///
/// Starts from the connected components, then repeatedly deletes the edge of
/// highest betweenness (ties go to the smallest `(u, v)` pair) and
/// recomputes betweenness inside the affected components. A partition is
/// recorded whenever the component count grows, until `max_communities` is
/// reached or no edges remain. Modularity is always measured on the original
/// graph.
///
/// The first element is the initial component partition, so the sequence has
/// strictly increasing community counts.
pub fn girvan_newman(
    graph: &UndirectedGraph,
    max_communities: usize,
) -> Result<Vec<CommunityPartition>> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes(n));
    }
    if max_communities < 2 {
        return Err(Error::invalid("max_communities must be at least 2"));
    }

    let edges = graph.edges();
    let mut alive = vec![true; edges.len()];
    let mut remaining = edges.len();
    let mut scores = vec![0.0; edges.len()];
    let all: Vec<usize> = (0..n).collect();
    accumulate(graph, &alive, &all, &mut scores);

    let mut labels = graph.components();
    let mut count = labels.iter().max().map_or(0, |&c| c + 1);
    let mut removed = 0;
    let mut out = vec![record(graph, &labels, count, removed)?];

    while count < max_communities && remaining > 0 {
        let target = pick_edge(edges, &alive, &scores);
        alive[target] = false;
        remaining -= 1;
        removed += 1;
        scores[target] = 0.0;

        let (u, v) = edges[target];
        let old = labels[u];
        let new_labels = components_with(graph, |e| alive[e]);
        let split = new_labels[u] != new_labels[v];

        // Only paths inside the old component of (u, v) changed.
        let affected: Vec<usize> = (0..n).filter(|&x| labels[x] == old).collect();
        for (e, &(a, _)) in edges.iter().enumerate() {
            if alive[e] && labels[a] == old {
                scores[e] = 0.0;
            }
        }
        accumulate(graph, &alive, &affected, &mut scores);

        labels = new_labels;
        if split {
            count += 1;
            out.push(record(graph, &labels, count, removed)?);
        }
    }
    Ok(out)
}

fn pick_edge(edges: &[(usize, usize)], alive: &[bool], scores: &[f64]) -> usize {
    let max = scores
        .iter()
        .zip(alive)
        .filter(|(_, &a)| a)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = max - TIE_EPS * max.abs().max(1.0);
    // edges are sorted, so the first candidate has the smallest endpoint pair
    (0..edges.len())
        .find(|&e| alive[e] && scores[e] >= floor)
        .expect("at least one live edge")
}

fn record(
    graph: &UndirectedGraph,
    labels: &[usize],
    count: usize,
    removed: usize,
) -> Result<CommunityPartition> {
    Ok(CommunityPartition {
        assignment: labels.to_vec(),
        num_communities: count,
        modularity: modularity(graph, labels)?,
        removed_edges: removed,
    })
}

/// The partition of highest modularity; the earlier (coarser) one wins ties.
pub fn best_partition(sequence: &[CommunityPartition]) -> Option<&CommunityPartition> {
    sequence.iter().fold(None, |best, p| match best {
        Some(b) if b.modularity >= p.modularity => Some(b),
        _ => Some(p),
    })
}
