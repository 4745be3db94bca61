//! Synthetic corpus with planted clusters, hubs and vocabularies.
//!
//! Each cluster owns a few hub accounts that post originals and a crowd of
//! followers that only retweet. A follower retweets hubs of its own cluster
//! with probability `intra_prob`, otherwise a hub of another cluster. Text
//! is drawn from the vocabulary of the cluster whose hub wrote it, so a
//! retweet's true cluster is its source's.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::RawTweet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub name: String,
    pub proportion: f64,
    pub topic_words: Vec<String>,
    pub emotion_words: Vec<String>,
    pub concern_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub clusters: Vec<ClusterSpec>,
    pub n_tweets: usize,
    pub hubs_per_cluster: usize,
    /// Share of each cluster's tweets that are retweets.
    pub retweet_share: f64,
    pub retweets_per_follower: usize,
    pub intra_prob: f64,
    /// Chance that a tweet carries a concern keyword.
    pub concern_rate: f64,
    /// Share of body words drawn from the cluster's topic vocabulary.
    pub topic_share: f64,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub seed: u64,
}

fn words(list: &str) -> Vec<String> {
    list.split_whitespace().map(String::from).collect()
}

const SHARED_WORDS: &str =
    "people today week city time world virus coronavirus covid state country home";
const FILLER: &str = "the and is of to in for on with this";
const DECORATIONS: [&str; 5] = [
    "#COVID19",
    "#coronavirus",
    "https://t.co/x7Yq2",
    "@someone",
    "😷",
];

impl Default for FixtureSpec {
    fn default() -> Self {
        let cluster = |name: &str, p: f64, topic: &str, emotion: &str, concern: &str| ClusterSpec {
            name: name.into(),
            proportion: p,
            topic_words: words(topic),
            emotion_words: words(emotion),
            concern_words: words(concern),
        };
        FixtureSpec {
            clusters: vec![
                cluster(
                    "news",
                    0.36,
                    "breaking update report live headline coverage anchor broadcast press \
                     journalist story bulletin correspondent editor newsroom announce \
                     statement briefing latest interview reporter channel",
                    "shock alarm urgent unexpected warn suddenly",
                    "travel flights airplane trip pandemic",
                ),
                cluster(
                    "health",
                    0.33,
                    "patient nurse clinic ward testing ventilator physician medicine \
                     diagnosis respiratory lung immune antibody staff shift bed admission \
                     oxygen frontline ambulance icu",
                    "fear pain sick worry suffering grief",
                    "symptoms symptom masks wash hands hygiene",
                ),
                cluster(
                    "research",
                    0.18,
                    "study scientist data trial paper model analysis genome sequence lab \
                     researcher peer evidence sample journal estimate university preprint \
                     statistic cohort experiment protein",
                    "hope expect confident success improve cure",
                    "vaccine vaccination epidemic",
                ),
                cluster(
                    "politics",
                    0.13,
                    "government senate congress president minister policy vote election \
                     campaign bill law party governor mayor parliament debate federal budget \
                     candidate administration legislation",
                    "outrage blame corrupt unfair fraud furious",
                    "travel flying pandemic masks",
                ),
            ],
            n_tweets: 1000,
            hubs_per_cluster: 3,
            retweet_share: 0.6,
            retweets_per_follower: 3,
            intra_prob: 0.95,
            concern_rate: 0.5,
            topic_share: 0.55,
            start: Utc.with_ymd_and_hms(2020, 2, 1, 0, 0, 0).unwrap(),
            end: Utc.with_ymd_and_hms(2020, 5, 1, 0, 0, 0).unwrap(),
            seed: 2020,
        }
    }
}

/// Ground truth for a generated corpus.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FixtureTruth {
    pub clusters: Vec<String>,
    /// Home cluster of every account.
    pub authors: BTreeMap<String, String>,
    /// Cluster whose vocabulary produced each tweet.
    pub tweets: BTreeMap<String, String>,
    pub hubs: Vec<String>,
}

impl FixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_empty() || self.n_tweets == 0 {
            return Err(Error::invalid("fixture needs clusters and tweets"));
        }
        let total: f64 = self.clusters.iter().map(|c| c.proportion).sum();
        if (total - 1.0).abs() > 1e-9 || self.clusters.iter().any(|c| c.proportion <= 0.0) {
            return Err(Error::invalid(
                "cluster proportions must be positive and sum to 1",
            ));
        }
        for c in &self.clusters {
            if c.topic_words.is_empty() || c.emotion_words.is_empty() || c.concern_words.is_empty()
            {
                return Err(Error::invalid(format!(
                    "cluster {} has an empty word list",
                    c.name
                )));
            }
        }
        if self.cluster_sizes().contains(&0) {
            return Err(Error::invalid("a cluster receives no tweets"));
        }
        if self.hubs_per_cluster == 0 || self.retweets_per_follower == 0 {
            return Err(Error::invalid(
                "hubs_per_cluster and retweets_per_follower must be positive",
            ));
        }
        for p in [self.retweet_share, self.intra_prob, self.concern_rate] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid("probabilities must lie in [0, 1]"));
            }
        }
        if !(0.0..=0.7).contains(&self.topic_share) {
            return Err(Error::invalid("topic_share must lie in [0, 0.7]"));
        }
        if self.end <= self.start {
            return Err(Error::invalid("fixture time span is empty"));
        }
        Ok(())
    }

    /// Tweets per cluster by largest remainder: floors first, then one
    /// extra tweet to the largest fractional parts, earlier clusters first
    /// on ties.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let exact: Vec<f64> = self
            .clusters
            .iter()
            .map(|c| c.proportion * self.n_tweets as f64)
            .collect();
        let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let short = self.n_tweets.saturating_sub(sizes.iter().sum());
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        order.sort_by(|&a, &b| {
            let (fa, fb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in order.iter().take(short) {
            sizes[i] += 1;
        }
        sizes
    }
}

struct Draft {
    author: String,
    source_cluster: usize,
    retweeted: Option<String>,
    created_at: DateTime<Utc>,
    text: String,
}

/// Generate a corpus, sorted by time with ids `t000001`, and its truth.
pub fn generate_fixture(spec: &FixtureSpec) -> Result<(Vec<RawTweet>, FixtureTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sizes = spec.cluster_sizes();
    let k = spec.clusters.len();
    let hubs: Vec<Vec<String>> = spec
        .clusters
        .iter()
        .map(|c| {
            (1..=spec.hubs_per_cluster)
                .map(|i| format!("{}_hub{i}", c.name))
                .collect()
        })
        .collect();

    let mut truth = FixtureTruth {
        clusters: spec.clusters.iter().map(|c| c.name.clone()).collect(),
        hubs: hubs.iter().flatten().cloned().collect(),
        ..Default::default()
    };
    for (c, list) in hubs.iter().enumerate() {
        for h in list {
            truth
                .authors
                .insert(h.clone(), spec.clusters[c].name.clone());
        }
    }

    // follower handles are numbered in a shuffled order so they carry no
    // cluster information
    let retweet_counts: Vec<usize> = sizes
        .iter()
        .map(|&n| (n as f64 * spec.retweet_share).round() as usize)
        .collect();
    let follower_counts: Vec<usize> = retweet_counts
        .iter()
        .map(|&r| r.div_ceil(spec.retweets_per_follower))
        .collect();
    let total_followers: usize = follower_counts.iter().sum();
    let mut numbers: Vec<usize> = (0..total_followers).collect();
    numbers.shuffle(&mut rng);
    let mut numbers = numbers.into_iter();
    let followers: Vec<Vec<String>> = follower_counts
        .iter()
        .map(|&n| {
            (0..n)
                .map(|_| format!("user{:05}", numbers.next().unwrap()))
                .collect()
        })
        .collect();
    for (c, list) in followers.iter().enumerate() {
        for f in list {
            truth
                .authors
                .insert(f.clone(), spec.clusters[c].name.clone());
        }
    }

    let span = (spec.end - spec.start).num_seconds();
    let mut drafts = Vec::new();
    for c in 0..k {
        let originals = sizes[c] - retweet_counts[c];
        for _ in 0..originals {
            let author = hubs[c].choose(&mut rng).unwrap().clone();
            drafts.push(Draft {
                author,
                source_cluster: c,
                retweeted: None,
                created_at: spec.start + Duration::seconds(rng.gen_range(0..span)),
                text: compose(spec, c, &mut rng),
            });
        }
        for r in 0..retweet_counts[c] {
            // the first pass gives every follower one retweet
            let author = if r < followers[c].len() {
                followers[c][r].clone()
            } else {
                followers[c].choose(&mut rng).unwrap().clone()
            };
            let source = if k == 1 || rng.gen_bool(spec.intra_prob) {
                c
            } else {
                let other = rng.gen_range(0..k - 1);
                if other >= c {
                    other + 1
                } else {
                    other
                }
            };
            drafts.push(Draft {
                author,
                source_cluster: source,
                retweeted: Some(hubs[source].choose(&mut rng).unwrap().clone()),
                created_at: spec.start + Duration::seconds(rng.gen_range(0..span)),
                text: compose(spec, source, &mut rng),
            });
        }
    }
    drafts.sort_by_key(|d| d.created_at);

    let tweets = drafts
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let id = format!("t{:06}", i + 1);
            truth
                .tweets
                .insert(id.clone(), spec.clusters[d.source_cluster].name.clone());
            RawTweet {
                id,
                author: d.author,
                created_at: d.created_at,
                text: d.text,
                retweeted_author: d.retweeted,
            }
        })
        .collect();
    Ok((tweets, truth))
}

fn compose(spec: &FixtureSpec, c: usize, rng: &mut ChaCha8Rng) -> String {
    let cluster = &spec.clusters[c];
    let shared = words(SHARED_WORDS);
    let filler = words(FILLER);
    let n = rng.gen_range(6..=10);
    let mut out: Vec<String> = Vec::with_capacity(n + 4);
    for _ in 0..n {
        let roll: f64 = rng.gen();
        let pool = if roll < spec.topic_share {
            &cluster.topic_words
        } else if roll < spec.topic_share + 0.2 {
            &shared
        } else if roll < spec.topic_share + 0.3 {
            &cluster.emotion_words
        } else {
            &filler
        };
        out.push(pool.choose(rng).unwrap().clone());
    }
    if rng.gen_bool(spec.concern_rate) {
        let pos = rng.gen_range(0..=out.len());
        out.insert(pos, cluster.concern_words.choose(rng).unwrap().clone());
    }
    if rng.gen_bool(0.3) {
        out.push(DECORATIONS.choose(rng).unwrap().to_string());
    }
    if let Some(first) = out.first_mut() {
        let mut chars = first.chars();
        if let Some(h) = chars.next() {
            *first = h.to_uppercase().chain(chars).collect();
        }
    }
    let mut text = out.join(" ");
    if rng.gen_bool(0.5) {
        text.push('!');
    }
    text
}

/// Write one JSON record per line.
pub fn write_jsonl(path: &Path, tweets: &[RawTweet]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for t in tweets {
        serde_json::to_writer(&mut w, t)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_truth(path: &Path, truth: &FixtureTruth) -> Result<()> {
    let text = serde_json::to_string_pretty(truth)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_truth(path: &Path) -> Result<FixtureTruth> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_retweet_graph, pagerank, select_leaders, PageRankConfig};

    #[test]
    fn largest_remainder_sizes() {
        let spec = FixtureSpec {
            n_tweets: 4000,
            ..Default::default()
        };
        assert_eq!(spec.cluster_sizes(), vec![1440, 1320, 720, 520]);
        let spec = FixtureSpec {
            n_tweets: 1001,
            ..Default::default()
        };
        let sizes = spec.cluster_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 1001);
        assert_eq!(sizes, vec![361, 330, 180, 130]);
    }

    #[test]
    fn truth_covers_everything() {
        let (tweets, truth) = generate_fixture(&FixtureSpec::default()).unwrap();
        assert_eq!(tweets.len(), 1000);
        assert_eq!(truth.tweets.len(), 1000);
        for t in &tweets {
            assert!(truth.authors.contains_key(&t.author));
            if let Some(r) = &t.retweeted_author {
                assert!(truth.hubs.contains(r));
            }
        }
        let mut per_cluster: BTreeMap<&str, usize> = BTreeMap::new();
        for t in &tweets {
            *per_cluster
                .entry(truth.authors[&t.author].as_str())
                .or_default() += 1;
        }
        assert_eq!(per_cluster["news"], 360);
        assert_eq!(per_cluster["politics"], 130);
        assert!(tweets
            .windows(2)
            .all(|w| w[0].created_at <= w[1].created_at));
    }

    #[test]
    fn every_follower_retweets() {
        let (tweets, truth) = generate_fixture(&FixtureSpec::default()).unwrap();
        for handle in truth.authors.keys().filter(|h| !truth.hubs.contains(h)) {
            assert!(tweets.iter().any(|t| &t.author == handle && t.is_retweet()));
        }
    }

    #[test]
    fn seeded() {
        let a = generate_fixture(&FixtureSpec::default()).unwrap();
        let b = generate_fixture(&FixtureSpec::default()).unwrap();
        assert_eq!(a, b);
        let c = generate_fixture(&FixtureSpec {
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn hubs_lead_pagerank() {
        let (tweets, truth) = generate_fixture(&FixtureSpec::default()).unwrap();
        let g = build_retweet_graph(&tweets);
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        let mut top = select_leaders(&pr, truth.hubs.len());
        top.sort();
        let mut hubs = truth.hubs.clone();
        hubs.sort();
        assert_eq!(top, hubs);
    }

    #[test]
    fn degenerate_specs_rejected() {
        let mut spec = FixtureSpec::default();
        spec.clusters[0].proportion = 0.5;
        assert!(generate_fixture(&spec).is_err());
        let spec = FixtureSpec {
            n_tweets: 3,
            ..Default::default()
        };
        assert!(generate_fixture(&spec).is_err());
    }
}
