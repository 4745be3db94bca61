//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling, with
//! perplexity and UMass coherence for choosing the topic count.
//!
//! Estimates of the topic–word (`phi`) and document–topic (`theta`)
//! distributions are averaged over the sweeps after burn-in. For a single
//! topic they reduce to the smoothed corpus word frequencies.

mod coherence;
mod lda;
mod sweep;

use std::path::Path;

use crate::error::{Error, Result};

pub use coherence::umass_coherence;
pub use lda::{fit_lda, fit_lda_observed, LdaConfig, TopicModel};
pub use sweep::{sweep_topic_count, SweepReport, SweepRow, TOP_N};

/// Write `topic,rank,word,probability` rows; topics and ranks count from 1.
pub fn write_topics_csv(path: &Path, topics: &[Vec<(String, f64)>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["topic", "rank", "word", "probability"])?;
    for (t, words) in topics.iter().enumerate() {
        for (r, (word, p)) in words.iter().enumerate() {
            w.write_record([
                (t + 1).to_string(),
                (r + 1).to_string(),
                word.clone(),
                format!("{p:.6}"),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write `K,perplexity,mean_coherence` rows.
pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["K", "perplexity", "mean_coherence"])?;
    for row in &report.rows {
        w.write_record([
            row.k.to_string(),
            format!("{:.6}", row.perplexity),
            format!("{:.6}", row.mean_coherence),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
