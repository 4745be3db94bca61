//! Word–emotion lexicon scoring over the eight basic emotions.
//!
//! A tweet's profile counts, for every distinct lexicon word it contains, one
//! hit for each emotion the word is associated with. Repeating a word adds
//! nothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_LEXICON: &str = include_str!("../data/emotion_lexicon.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Anticipation,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Trust,
}

impl Emotion {
    pub const ALL: [Emotion; 8] = [
        Emotion::Anger,
        Emotion::Anticipation,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Joy,
        Emotion::Sadness,
        Emotion::Surprise,
        Emotion::Trust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Anticipation => "anticipation",
            Emotion::Disgust => "disgust",
            Emotion::Fear => "fear",
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
            Emotion::Surprise => "surprise",
            Emotion::Trust => "trust",
        }
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown emotion {s:?}"))
    }
}

/// Non-empty set of emotions, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmotionSet(u8);

impl EmotionSet {
    pub fn insert(&mut self, e: Emotion) {
        self.0 |= e.bit();
    }

    pub fn contains(self, e: Emotion) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Emotion> {
        Emotion::ALL.into_iter().filter(move |e| self.contains(*e))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl FromIterator<Emotion> for EmotionSet {
    fn from_iter<I: IntoIterator<Item = Emotion>>(iter: I) -> Self {
        let mut set = EmotionSet::default();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmotionLexicon {
    entries: HashMap<String, EmotionSet>,
}

impl EmotionLexicon {
    /// The bundled lexicon (about 200 crisis-relevant words).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, Path::new("<bundled emotion_lexicon.tsv>"))
            .expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parse `word<TAB>emotion` rows. Blank lines and `#` comments are
    /// skipped, `positive`/`negative` polarity rows are ignored, and rows for
    /// the same word are merged.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries: HashMap<String, EmotionSet> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [word, emotion] = fields[..] else {
                return Err(err(format!("expected word<TAB>emotion, got {line:?}")));
            };
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(err("empty word".into()));
            }
            let emotion = emotion.trim().to_lowercase();
            if emotion == "positive" || emotion == "negative" {
                continue;
            }
            let emotion: Emotion = emotion.parse().map_err(err)?;
            entries.entry(word).or_default().insert(emotion);
        }
        Ok(EmotionLexicon { entries })
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<Emotion>)>,
        S: Into<String>,
    {
        let mut lex = EmotionLexicon::default();
        for (word, emotions) in entries {
            let set: EmotionSet = emotions.into_iter().collect();
            if !set.is_empty() {
                let slot = lex.entries.entry(word.into()).or_default();
                slot.0 |= set.0;
            }
        }
        lex
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<EmotionSet> {
        self.entries.get(word).copied()
    }

    /// Lexicon words sorted alphabetically.
    pub fn words(&self) -> Vec<&str> {
        let mut w: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        w.sort_unstable();
        w
    }
}

/// Per-emotion counts in [`Emotion::ALL`] order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionProfile {
    pub counts: [u64; 8],
}

impl EmotionProfile {
    pub fn get(&self, e: Emotion) -> u64 {
        self.counts[e as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, other: &EmotionProfile) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }

    /// Shares summing to one, or all zeros for an empty profile.
    pub fn shares(&self) -> [f64; 8] {
        let total = self.total();
        if total == 0 {
            return [0.0; 8];
        }
        self.counts.map(|c| c as f64 / total as f64)
    }
}

/// Score one tweet from its unstemmed tokens.
pub fn score_emotions<S: AsRef<str>>(tokens: &[S], lexicon: &EmotionLexicon) -> EmotionProfile {
    let distinct: BTreeSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let mut profile = EmotionProfile::default();
    for word in distinct {
        if let Some(set) = lexicon.get(word) {
            for e in set.iter() {
                profile.counts[e as usize] += 1;
            }
        }
    }
    profile
}

/// Pool profiles per group key and normalise each pool to shares. Keys with
/// no profiles do not appear.
pub fn aggregate_emotions<K, I>(items: I) -> BTreeMap<K, [f64; 8]>
where
    K: Ord,
    I: IntoIterator<Item = (K, EmotionProfile)>,
{
    let mut pooled: BTreeMap<K, EmotionProfile> = BTreeMap::new();
    for (key, profile) in items {
        pooled.entry(key).or_default().add(&profile);
    }
    pooled.into_iter().map(|(k, p)| (k, p.shares())).collect()
}

/// Write `group,anger,...,trust` rows.
pub fn write_aggregate_csv<K: fmt::Display, W: std::io::Write>(
    aggregate: &BTreeMap<K, [f64; 8]>,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["group".to_string()];
    header.extend(Emotion::ALL.iter().map(|e| e.name().to_string()));
    w.write_record(&header)?;
    for (key, shares) in aggregate {
        let mut row = vec![key.to_string()];
        row.extend(shares.iter().map(|s| s.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
