use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use log::debug;
use serde::{Deserialize, Serialize};

use super::RawTweet;
use crate::error::{Error, Result};

/// Dataset summary in the shape of a collection report: totals split into
/// originals and retweets, distinct accounts, and the lines that could not
/// be parsed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub total: usize,
    pub originals: usize,
    pub retweets: usize,
    /// Distinct handles seen as author or as retweeted account.
    pub distinct_users: usize,
    pub malformed_skipped: usize,
    /// Valid records rejected by the keyword filter (not part of `total`).
    #[serde(default)]
    pub filtered_out: usize,
}

impl IngestStats {
    /// `(label, value)` rows in report order.
    pub fn rows(&self) -> [(&'static str, usize); 6] {
        [
            ("tweets", self.total),
            ("original_tweets", self.originals),
            ("retweets", self.retweets),
            ("users", self.distinct_users),
            ("malformed_skipped", self.malformed_skipped),
            ("filtered_out", self.filtered_out),
        ]
    }
}

/// Read one JSON record per line. Malformed lines are counted and skipped.
pub fn ingest_jsonl(path: &Path) -> Result<(Vec<RawTweet>, IngestStats)> {
    ingest_jsonl_filtered(path, &[])
}

/// Like [`ingest_jsonl`], keeping only tweets whose text contains one of the
/// keywords (case-insensitive). An empty keyword list keeps everything.
pub fn ingest_jsonl_filtered(
    path: &Path,
    keywords: &[String],
) -> Result<(Vec<RawTweet>, IngestStats)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_jsonl(&text, keywords))
}

pub fn parse_jsonl(text: &str, keywords: &[String]) -> (Vec<RawTweet>, IngestStats) {
    let keywords: Vec<String> = keywords.iter().map(|k| k.to_lowercase()).collect();
    let mut stats = IngestStats::default();
    let mut seen_ids = HashSet::new();
    let mut users = BTreeSet::new();
    let mut tweets = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let tweet: RawTweet = match serde_json::from_str(line) {
            Ok(t) => t,
            Err(e) => {
                debug!("line {}: {e}", lineno + 1);
                stats.malformed_skipped += 1;
                continue;
            }
        };
        let bad_retweet = matches!(&tweet.retweeted_author, Some(r) if r.trim().is_empty());
        if tweet.id.is_empty() || tweet.author.is_empty() || bad_retweet {
            debug!("line {}: empty id, author or retweeted_author", lineno + 1);
            stats.malformed_skipped += 1;
            continue;
        }
        if !seen_ids.insert(tweet.id.clone()) {
            debug!("line {}: duplicate id {}", lineno + 1, tweet.id);
            stats.malformed_skipped += 1;
            continue;
        }
        if !keywords.is_empty() {
            let lower = tweet.text.to_lowercase();
            if !keywords.iter().any(|k| lower.contains(k.as_str())) {
                stats.filtered_out += 1;
                continue;
            }
        }
        stats.total += 1;
        if tweet.is_retweet() {
            stats.retweets += 1;
        } else {
            stats.originals += 1;
        }
        users.insert(tweet.author.clone());
        if let Some(r) = &tweet.retweeted_author {
            users.insert(r.clone());
        }
        tweets.push(tweet);
    }
    stats.distinct_users = users.len();
    (tweets, stats)
}
