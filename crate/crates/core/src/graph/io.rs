//! CSV exchange formats: edge lists `src,dst,weight`, partitions
//! `handle,community` and PageRank scores `handle,score`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{CommunityPartition, PageRankVector, RetweetGraph};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    src: String,
    dst: String,
    weight: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PartitionRow {
    pub handle: String,
    pub community: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRow<'a> {
    handle: &'a str,
    score: f64,
}

pub fn write_edges_csv<W: Write>(graph: &RetweetGraph, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for (s, d, weight) in graph.edges() {
        w.serialize(EdgeRow {
            src: graph.handle(s).to_string(),
            dst: graph.handle(d).to_string(),
            weight,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Nodes without edges are not representable in an edge list and are lost
/// on a round trip.
pub fn read_edges_csv<R: Read>(reader: R) -> Result<RetweetGraph> {
    let mut r = csv::Reader::from_reader(reader);
    let mut edges = Vec::new();
    for row in r.deserialize() {
        let row: EdgeRow = row?;
        if row.weight == 0 {
            return Err(Error::invalid(format!(
                "edge {} -> {} has zero weight",
                row.src, row.dst
            )));
        }
        edges.push((row.src, row.dst, row.weight));
    }
    Ok(RetweetGraph::from_edges(Vec::<String>::new(), edges))
}

/// One row per node of `graph`, in index order.
pub fn write_partition_csv<W: Write>(
    graph: &RetweetGraph,
    partition: &CommunityPartition,
    writer: W,
) -> Result<()> {
    if partition.assignment.len() != graph.node_count() {
        return Err(Error::PartialPartition {
            assigned: partition.assignment.len(),
            nodes: graph.node_count(),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    for (node, &community) in partition.assignment.iter().enumerate() {
        w.serialize(PartitionRow {
            handle: graph.handle(node).to_string(),
            community,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_partition_csv<R: Read>(reader: R) -> Result<Vec<PartitionRow>> {
    let mut r = csv::Reader::from_reader(reader);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Rows in ranking order (descending score, ties by handle).
pub fn write_pagerank_csv<W: Write>(pr: &PageRankVector, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for i in pr.ranking() {
        w.serialize(ScoreRow {
            handle: &pr.handles[i],
            score: pr.scores[i],
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pagerank, PageRankConfig};

    #[test]
    fn edge_list_round_trip() {
        let g = RetweetGraph::from_edges(
            Vec::<&str>::new(),
            [("a", "b", 2), ("c", "b", 1), ("b", "a", 5)],
        );
        let mut buf = Vec::new();
        write_edges_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("src,dst,weight\n"));
        assert_eq!(read_edges_csv(buf.as_slice()).unwrap(), g);
    }

    #[test]
    fn partition_and_scores_headers() {
        let g = RetweetGraph::from_edges(Vec::<&str>::new(), [("a", "b", 1)]);
        let p = CommunityPartition {
            assignment: vec![0, 0],
            num_communities: 1,
            modularity: 0.0,
            removed_edges: 0,
        };
        let mut buf = Vec::new();
        write_partition_csv(&g, &p, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "handle,community\na,0\nb,0\n"
        );
        let rows = read_partition_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 2);

        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_pagerank_csv(&pr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("handle,score\nb,"));
    }

    #[test]
    fn zero_weight_rejected() {
        let csv = "src,dst,weight\na,b,0\n";
        assert!(read_edges_csv(csv.as_bytes()).is_err());
    }
}
