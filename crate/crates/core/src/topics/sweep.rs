use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_lda, umass_coherence, LdaConfig};
use crate::error::Result;

/// Words per topic used for coherence and reported in topic tables.
pub const TOP_N: usize = 10;

/// One successful fit of a topic-count sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub perplexity: f64,
    pub mean_coherence: f64,
    pub coherence: Vec<f64>,
    /// Top words with probabilities, one list per topic.
    pub topics: Vec<Vec<(String, f64)>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Sorted by `k`.
    pub rows: Vec<SweepRow>,
    /// Topic counts whose fit failed, with the error message.
    pub failures: Vec<(usize, String)>,
}

impl SweepReport {
    /// Row of highest mean coherence; the smaller `k` wins ties.
    pub fn best_by_coherence(&self) -> Option<&SweepRow> {
        self.rows.iter().fold(None, |best, r| match best {
            Some(b) if b.mean_coherence >= r.mean_coherence => Some(b),
            _ => Some(r),
        })
    }

    pub fn row(&self, k: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.k == k)
    }
}

/// Fit one model per topic count with the template's seed and record
/// training perplexity and UMass coherence. A failed fit is recorded and the
/// sweep goes on.
pub fn sweep_topic_count<S>(
    docs: &[Vec<S>],
    k_range: impl IntoIterator<Item = usize>,
    template: &LdaConfig,
) -> SweepReport
where
    S: AsRef<str> + Sync,
{
    let mut ks: Vec<usize> = k_range.into_iter().collect();
    ks.sort_unstable();
    ks.dedup();
    let results: Vec<(usize, Result<SweepRow>)> = ks
        .par_iter()
        .map(|&k| (k, fit_one(docs, k, template)))
        .collect();
    let mut report = SweepReport::default();
    for (k, res) in results {
        match res {
            Ok(row) => report.rows.push(row),
            Err(e) => {
                log::warn!("topic fit for K={k} failed: {e}");
                report.failures.push((k, e.to_string()));
            }
        }
    }
    report
}

fn fit_one<S: AsRef<str>>(docs: &[Vec<S>], k: usize, template: &LdaConfig) -> Result<SweepRow> {
    let cfg = LdaConfig {
        k,
        ..template.clone()
    };
    let model = fit_lda(docs, &cfg)?;
    let coherence = umass_coherence(&model, docs, TOP_N);
    let mean_coherence = coherence.iter().sum::<f64>() / coherence.len() as f64;
    Ok(SweepRow {
        k,
        perplexity: model.perplexity()?,
        mean_coherence,
        coherence,
        topics: (0..k).map(|t| model.top_words(t, TOP_N)).collect(),
    })
}
