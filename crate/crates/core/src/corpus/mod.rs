//! Tweet ingestion and text cleaning.
//!
//! Raw records come in as JSON lines. Cleaning runs in two phases:
//! [`normalize_text`] strips everything that is not a word, and
//! [`tokenize_and_reduce`] splits, filters stopwords, optionally
//! spell-corrects, and stems.

mod ingest;
mod normalize;
pub mod porter;
mod spell;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{ingest_jsonl, ingest_jsonl_filtered, parse_jsonl, IngestStats};
pub use normalize::normalize_text;
pub use spell::SpellChecker;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const BUNDLED_SLANG: &str = include_str!("../../data/slang.tsv");

/// One tweet as collected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTweet {
    pub id: String,
    pub author: String,
    pub created_at: DateTime<Utc>,
    pub text: String,
    /// Handle of the retweeted account; `None` for original tweets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_author: Option<String>,
}

impl RawTweet {
    pub fn is_retweet(&self) -> bool {
        self.retweeted_author.is_some()
    }
}

/// A tweet after cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanTweet {
    pub id: String,
    pub author: String,
    pub created_at: DateTime<Utc>,
    /// Stemmed tokens (unstemmed when stemming is off).
    pub tokens: Vec<String>,
    pub clean_text: String,
    /// The same tokens before stemming, used for lexicon lookups.
    pub plain_tokens: Vec<String>,
}

impl CleanTweet {
    /// Calendar month of the tweet as `YYYY-MM`.
    pub fn month(&self) -> String {
        self.created_at.format("%Y-%m").to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub stopwords: BTreeSet<String>,
    pub slang_map: BTreeMap<String, String>,
    pub spell_correction: bool,
    pub stemming: bool,
    pub min_token_length: usize,
}

impl Default for PreprocessConfig {
    /// Bundled stopword list and slang dictionary, stemming on, spell
    /// correction off, minimum token length 2.
    fn default() -> Self {
        PreprocessConfig {
            stopwords: parse_stopwords(BUNDLED_STOPWORDS),
            slang_map: parse_slang(BUNDLED_SLANG, Path::new("<bundled slang.tsv>"))
                .expect("bundled slang table is valid"),
            spell_correction: false,
            stemming: true,
            min_token_length: 2,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_token_length == 0 {
            return Err(Error::Config("min_token_length must be >= 1".into()));
        }
        for (key, value) in &self.slang_map {
            if key.is_empty() || !key.chars().all(|c| c.is_alphabetic() && c.is_lowercase()) {
                return Err(Error::Config(format!(
                    "slang key {key:?} must be a single lowercase word"
                )));
            }
            if value.to_lowercase() != *value {
                return Err(Error::Config(format!(
                    "slang value {value:?} must be lowercase"
                )));
            }
            // A replacement containing another key would make cleaning
            // non-idempotent.
            if let Some(word) = value
                .split(|c: char| !c.is_alphabetic())
                .find(|w| self.slang_map.contains_key(*w))
            {
                return Err(Error::Config(format!(
                    "slang value for {key:?} contains slang key {word:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(parse_stopwords(&text))
    }

    pub fn load_slang(path: &Path) -> Result<BTreeMap<String, String>> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_slang(&text, path)
    }
}

fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn parse_slang(text: &str, path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('\t') else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected key<TAB>replacement".into(),
            });
        };
        map.insert(key.trim().to_lowercase(), value.trim().to_lowercase());
    }
    Ok(map)
}

/// Stemmed and unstemmed token lists for one text.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReducedTokens {
    pub stemmed: Vec<String>,
    pub plain: Vec<String>,
}

/// Split normalized text and reduce it to the final token list.
pub fn tokenize_and_reduce(text: &str, config: &PreprocessConfig) -> Vec<String> {
    let reduced = reduce_tokens(text, config);
    if config.stemming {
        reduced.stemmed
    } else {
        reduced.plain
    }
}

/// Like [`tokenize_and_reduce`] but keeps both the stemmed and the plain lists.
pub fn reduce_tokens(text: &str, config: &PreprocessConfig) -> ReducedTokens {
    let speller = config.spell_correction.then(SpellChecker::bundled);
    let mut out = ReducedTokens::default();
    for word in text.split_whitespace() {
        if config.stopwords.contains(word) {
            continue;
        }
        let word = match speller {
            Some(s) => s.correct(word),
            None => word.to_string(),
        };
        if config.stopwords.contains(&word) {
            continue;
        }
        if config.stemming {
            let stemmed = porter::stem(&word);
            if stemmed.chars().count() >= config.min_token_length {
                out.stemmed.push(stemmed);
            }
        }
        if word.chars().count() >= config.min_token_length {
            out.plain.push(word);
        }
    }
    if !config.stemming {
        out.stemmed = out.plain.clone();
    }
    out
}

/// Result of [`preprocess_corpus`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessOutput {
    pub tweets: Vec<CleanTweet>,
    /// Tweets whose token list came out empty.
    pub dropped: usize,
}

/// Clean every tweet; blank results are dropped and counted.
pub fn preprocess_corpus(tweets: &[RawTweet], config: &PreprocessConfig) -> PreprocessOutput {
    let cleaned: Vec<Option<CleanTweet>> = tweets
        .par_iter()
        .map(|t| {
            let normalized = normalize_text(&t.text, config);
            let reduced = reduce_tokens(&normalized, config);
            if reduced.stemmed.is_empty() {
                return None;
            }
            Some(CleanTweet {
                id: t.id.clone(),
                author: t.author.clone(),
                created_at: t.created_at,
                clean_text: reduced.stemmed.join(" "),
                tokens: reduced.stemmed,
                plain_tokens: reduced.plain,
            })
        })
        .collect();
    let dropped = cleaned.iter().filter(|c| c.is_none()).count();
    PreprocessOutput {
        tweets: cleaned.into_iter().flatten().collect(),
        dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tweet(id: &str, text: &str) -> RawTweet {
        RawTweet {
            id: id.into(),
            author: "who".into(),
            created_at: "2020-02-03T10:00:00Z".parse().unwrap(),
            text: text.into(),
            retweeted_author: None,
        }
    }

    #[test]
    fn stems_and_drops_stopwords() {
        let cfg = PreprocessConfig::default();
        assert_eq!(
            tokenize_and_reduce("says wash your hands", &cfg),
            vec!["say", "wash", "hand"]
        );
    }

    #[test]
    fn stemming_off_passes_through() {
        let cfg = PreprocessConfig {
            stemming: false,
            ..Default::default()
        };
        assert_eq!(
            tokenize_and_reduce("says wash your hands", &cfg),
            vec!["says", "wash", "hands"]
        );
    }

    #[test]
    fn all_stopwords_is_empty() {
        let cfg = PreprocessConfig::default();
        assert!(tokenize_and_reduce("the and of your we", &cfg).is_empty());
    }

    #[test]
    fn min_length_filter() {
        let cfg = PreprocessConfig {
            min_token_length: 5,
            ..Default::default()
        };
        assert_eq!(
            tokenize_and_reduce("wash hands quickly", &cfg),
            vec!["quickli"]
        );
    }

    #[test]
    fn spell_correction_fixes_single_edit() {
        let cfg = PreprocessConfig {
            spell_correction: true,
            stemming: false,
            ..Default::default()
        };
        assert_eq!(tokenize_and_reduce("hospitl", &cfg), vec!["hospital"]);
    }

    #[test]
    fn blank_tweets_dropped() {
        let cfg = PreprocessConfig::default();
        let tweets = vec![
            tweet("1", "Wash your hands"),
            tweet("2", "@WHO https://t.co/x 123 !!"),
            tweet("3", "Fever and cough"),
        ];
        let out = preprocess_corpus(&tweets, &cfg);
        assert_eq!(out.tweets.len(), 2);
        assert_eq!(out.dropped, 1);
        assert_eq!(out.tweets.len() + out.dropped, tweets.len());
        assert_eq!(out.tweets[1].plain_tokens, vec!["fever", "cough"]);
    }

    #[test]
    fn bundled_config_is_valid() {
        PreprocessConfig::default().validate().unwrap();
    }

    #[test]
    fn slang_chain_rejected() {
        let mut cfg = PreprocessConfig::default();
        cfg.slang_map.insert("xyz".into(), "lol again".into());
        assert!(cfg.validate().is_err());
    }
}
