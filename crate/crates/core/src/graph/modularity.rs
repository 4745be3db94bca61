use super::UndirectedGraph;
use crate::error::{Error, Result};

/// Newman modularity `Q = sum_c (e_cc - a_c^2)` of a partition of the
/// undirected view. `e_cc` is the fraction of edges inside community `c`
/// and `a_c` the fraction of edge ends attached to it. A graph without
/// edges has `Q = 0`.
pub fn modularity(graph: &UndirectedGraph, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != graph.node_count() {
        return Err(Error::PartialPartition {
            assigned: assignment.len(),
            nodes: graph.node_count(),
        });
    }
    let m = graph.edge_count();
    if m == 0 {
        return Ok(0.0);
    }
    let communities = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0usize; communities];
    let mut ends = vec![0usize; communities];
    for &(u, v) in graph.edges() {
        let (cu, cv) = (assignment[u], assignment[v]);
        if cu == cv {
            inside[cu] += 1;
        }
        ends[cu] += 1;
        ends[cv] += 1;
    }
    let m = m as f64;
    Ok(inside
        .iter()
        .zip(&ends)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> UndirectedGraph {
        UndirectedGraph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])
    }

    #[test]
    fn single_community_is_zero() {
        let q = modularity(&two_triangles(), &[0; 6]).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn triangles_split_at_bridge() {
        let q = modularity(&two_triangles(), &[0, 0, 0, 1, 1, 1]).unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn partial_partition_rejected() {
        assert!(matches!(
            modularity(&two_triangles(), &[0, 0, 0]),
            Err(Error::PartialPartition { .. })
        ));
    }

    #[test]
    fn edgeless_graph() {
        let g = UndirectedGraph::new(3, []);
        assert_eq!(modularity(&g, &[0, 1, 2]).unwrap(), 0.0);
    }
}
