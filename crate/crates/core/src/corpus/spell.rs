use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

const BUNDLED_WORDS: &str = include_str!("../../data/words.txt");

/// Dictionary spell correction by single-edit lookup.
///
/// A word already in the dictionary is kept. Otherwise every string at
/// Levenshtein distance 1 is probed; a unique hit replaces the word, zero or
/// several hits leave it unchanged.
#[derive(Debug, Clone)]
pub struct SpellChecker {
    words: HashSet<String>,
}

impl SpellChecker {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SpellChecker {
            words: words.into_iter().map(Into::into).collect(),
        }
    }

    /// The bundled English word list (5000 frequent words).
    pub fn bundled() -> &'static SpellChecker {
        static CHECKER: OnceLock<SpellChecker> = OnceLock::new();
        CHECKER.get_or_init(|| {
            SpellChecker::new(
                BUNDLED_WORDS
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty()),
            )
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn correct(&self, word: &str) -> String {
        if self.words.contains(word) || !word.bytes().all(|b| b.is_ascii_lowercase()) {
            return word.to_string();
        }
        let mut hits = BTreeSet::new();
        for candidate in single_edits(word) {
            if self.words.contains(&candidate) {
                hits.insert(candidate);
                if hits.len() > 1 {
                    return word.to_string();
                }
            }
        }
        hits.into_iter().next().unwrap_or_else(|| word.to_string())
    }
}

fn single_edits(word: &str) -> impl Iterator<Item = String> + '_ {
    let bytes = word.as_bytes();
    let n = bytes.len();
    let deletes = (0..n).map(move |i| {
        let mut v = bytes.to_vec();
        v.remove(i);
        v
    });
    let substitutions = (0..n).flat_map(move |i| {
        (b'a'..=b'z').filter(move |&c| c != bytes[i]).map(move |c| {
            let mut v = bytes.to_vec();
            v[i] = c;
            v
        })
    });
    let inserts = (0..=n).flat_map(move |i| {
        (b'a'..=b'z').map(move |c| {
            let mut v = bytes.to_vec();
            v.insert(i, c);
            v
        })
    });
    deletes
        .chain(substitutions)
        .chain(inserts)
        .map(|v| String::from_utf8(v).expect("ascii"))
}
