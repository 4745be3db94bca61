//! Keyword annotation of public concerns, per-cluster concern counts and the
//! chi-square test of independence between cluster and concern.
//!
//! A concern name of the form `parent:child` is a sub-concern. Annotation
//! keeps sub-concerns apart; tables merge them into the `parent` column, and
//! a tweet hitting two children of one parent counts once there.

pub mod gamma;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{porter, CleanTweet};
use crate::error::{Error, Result};

pub type ConcernLabels = BTreeSet<String>;

/// Concern names with their stemmed keywords, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcernLexicon {
    concerns: Vec<(String, BTreeSet<String>)>,
}

impl Default for ConcernLexicon {
    fn default() -> Self {
        Self::from_entries([
            ("symptoms", &["symptom"][..]),
            ("vaccination", &["vaccine", "vaccination"]),
            ("countermeasures:hygiene", &["hygiene", "wash", "hand"]),
            ("countermeasures:mask", &["mask"]),
            (
                "travel",
                &["travel", "flying", "fly", "airplane", "flight", "trip"],
            ),
            ("pandemic", &["pandemic", "epidemic"]),
        ])
        .expect("default lexicon is valid")
    }
}

impl ConcernLexicon {
    /// Keywords are lowercased and stemmed. Names must be unique and every
    /// keyword a single word.
    pub fn from_entries<N, K, I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (N, K)>,
        N: Into<String>,
        K: IntoIterator,
        K::Item: AsRef<str>,
    {
        let mut concerns: Vec<(String, BTreeSet<String>)> = Vec::new();
        for (name, words) in entries {
            let name = name.into();
            if name.is_empty() || concerns.iter().any(|(n, _)| *n == name) {
                return Err(Error::Config(format!(
                    "duplicate or empty concern name {name:?}"
                )));
            }
            let mut stems = BTreeSet::new();
            for w in words {
                let w = w.as_ref().trim().to_lowercase();
                if w.is_empty() || !w.chars().all(|c| c.is_alphabetic()) {
                    return Err(Error::Config(format!(
                        "concern {name}: keyword {w:?} must be a single alphabetic word"
                    )));
                }
                stems.insert(porter::stem(&w));
            }
            if stems.is_empty() {
                return Err(Error::Config(format!("concern {name} has no keywords")));
            }
            concerns.push((name, stems));
        }
        if concerns.is_empty() {
            return Err(Error::Config("concern lexicon is empty".into()));
        }
        Ok(ConcernLexicon { concerns })
    }

    /// Parse the `[concerns]` table of a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        match doc.get("concerns") {
            Some(toml::Value::Table(t)) => Self::from_table(t),
            _ => Err(Error::Config("missing [concerns] table".into())),
        }
    }

    /// Build from a table of keyword arrays, keeping key order.
    pub fn from_table(table: &toml::Table) -> Result<Self> {
        let mut entries = Vec::new();
        for (name, value) in table {
            let words = value
                .as_array()
                .ok_or_else(|| Error::Config(format!("concern {name}: expected a keyword array")))?
                .iter()
                .map(|v| {
                    v.as_str().map(str::to_string).ok_or_else(|| {
                        Error::Config(format!("concern {name}: keywords must be strings"))
                    })
                })
                .collect::<Result<Vec<String>>>()?;
            entries.push((name.clone(), words));
        }
        Self::from_entries(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.concerns.iter().map(|(n, _)| n.as_str())
    }

    pub fn keywords(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.concerns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, k)| k)
    }

    /// Table columns: concern names with sub-concerns merged, in order of
    /// first appearance.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for (name, _) in &self.concerns {
            let col = column_of(name);
            if !cols.iter().any(|c| c == col) {
                cols.push(col.to_string());
            }
        }
        cols
    }
}

/// The table column a concern name belongs to.
pub fn column_of(name: &str) -> &str {
    name.split_once(':').map_or(name, |(parent, _)| parent)
}

/// Concerns whose stemmed keywords occur among `tokens`.
pub fn annotate_tokens<S: AsRef<str>>(tokens: &[S], lexicon: &ConcernLexicon) -> ConcernLabels {
    let present: BTreeSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
    lexicon
        .concerns
        .iter()
        .filter(|(_, keys)| keys.iter().any(|k| present.contains(k.as_str())))
        .map(|(name, _)| name.clone())
        .collect()
}

/// Annotate a preprocessed tweet; matching runs on its stemmed tokens.
pub fn annotate_concerns(tweet: &CleanTweet, lexicon: &ConcernLexicon) -> ConcernLabels {
    annotate_tokens(&tweet.tokens, lexicon)
}

pub fn annotate_corpus(tweets: &[CleanTweet], lexicon: &ConcernLexicon) -> Vec<ConcernLabels> {
    tweets
        .par_iter()
        .map(|t| annotate_concerns(t, lexicon))
        .collect()
}

/// Labels mapped onto table columns.
pub fn merge_subconcerns(labels: &ConcernLabels) -> BTreeSet<String> {
    labels.iter().map(|l| column_of(l).to_string()).collect()
}

/// Cluster-by-concern tweet counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    /// `cells[r][c]`, one row per cluster.
    pub cells: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<String>, cols: Vec<String>, cells: Vec<Vec<u64>>) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::RowMismatch(format!(
                "cells do not form a {}x{} table",
                rows.len(),
                cols.len()
            )));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols.len())
            .map(|c| self.cells.iter().map(|r| r[c]).sum())
            .collect()
    }

    /// Each row divided by its total; all-zero rows stay zero.
    pub fn shares(&self) -> Vec<Vec<f64>> {
        self.cells
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| {
                        if total == 0 {
                            0.0
                        } else {
                            c as f64 / total as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Copy without all-zero rows and columns.
    pub fn without_empty(&self) -> ContingencyTable {
        let keep_r: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.cells[r].iter().any(|&c| c > 0))
            .collect();
        let col_totals = self.col_totals();
        let keep_c: Vec<usize> = (0..self.cols.len())
            .filter(|&c| col_totals[c] > 0)
            .collect();
        ContingencyTable {
            rows: keep_r.iter().map(|&r| self.rows[r].clone()).collect(),
            cols: keep_c.iter().map(|&c| self.cols[c].clone()).collect(),
            cells: keep_r
                .iter()
                .map(|&r| keep_c.iter().map(|&c| self.cells[r][c]).collect())
                .collect(),
        }
    }

    /// Write `cluster,concern,count,share` rows.
    pub fn write_alignment_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["cluster", "concern", "count", "share"])?;
        let shares = self.shares();
        for (r, row) in self.rows.iter().enumerate() {
            for (c, col) in self.cols.iter().enumerate() {
                w.write_record([
                    row.clone(),
                    col.clone(),
                    self.cells[r][c].to_string(),
                    format!("{:.6}", shares[r][c]),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Count labelled tweets per cluster and concern column. Rows are the
/// distinct cluster names in sorted order, columns follow the lexicon. A
/// tweet with several columns adds one to each.
pub fn concern_alignment<C: AsRef<str>>(
    labels: &[ConcernLabels],
    clusters: &[C],
    lexicon: &ConcernLexicon,
) -> Result<ContingencyTable> {
    if labels.len() != clusters.len() {
        return Err(Error::RowMismatch(format!(
            "{} label sets for {} cluster ids",
            labels.len(),
            clusters.len()
        )));
    }
    let cols = lexicon.columns();
    let rows: Vec<String> = clusters
        .iter()
        .map(|c| c.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let row_index: BTreeMap<&str, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_str(), i))
        .collect();
    let mut cells = vec![vec![0u64; cols.len()]; rows.len()];
    for (set, cluster) in labels.iter().zip(clusters) {
        let r = row_index[cluster.as_ref()];
        for col in merge_subconcerns(set) {
            if let Some(c) = cols.iter().position(|x| *x == col) {
                cells[r][c] += 1;
            }
        }
    }
    let table = ContingencyTable { rows, cols, cells };
    if table.total() == 0 {
        return Err(Error::EmptyContingency);
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub reject_null: bool,
}

/// Pearson's chi-square test of independence between rows and columns.
pub fn chi_square_independence(table: &ContingencyTable, alpha: f64) -> Result<ChiSquareResult> {
    let (nr, nc) = (table.rows.len(), table.cols.len());
    if nr < 2 || nc < 2 {
        return Err(Error::DegenerateTable(format!(
            "need at least 2x2, got {nr}x{nc}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let rt = table.row_totals();
    let ct = table.col_totals();
    let n = table.total() as f64;
    let mut statistic = 0.0;
    for (r, &row_total) in rt.iter().enumerate() {
        for (c, &col_total) in ct.iter().enumerate() {
            let e = row_total as f64 * col_total as f64 / n.max(1.0);
            if e == 0.0 {
                return Err(Error::DegenerateTable(format!(
                    "expected count zero at ({}, {})",
                    table.rows[r], table.cols[c]
                )));
            }
            let d = table.cells[r][c] as f64 - e;
            statistic += d * d / e;
        }
    }
    let df = (nr - 1) * (nc - 1);
    let p_value = gamma::chi_square_sf(statistic, df as f64).clamp(0.0, 1.0);
    Ok(ChiSquareResult {
        statistic,
        df,
        p_value,
        alpha,
        reject_null: p_value < alpha,
    })
}

/// Most frequent unstemmed tokens among tweets labelled with each column,
/// by descending frequency then alphabetically.
pub fn concern_terms(
    tweets: &[CleanTweet],
    labels: &[ConcernLabels],
    top: usize,
) -> BTreeMap<String, Vec<(String, u64)>> {
    let mut freq: BTreeMap<String, BTreeMap<&str, u64>> = BTreeMap::new();
    for (tweet, set) in tweets.iter().zip(labels) {
        for col in merge_subconcerns(set) {
            let counts = freq.entry(col).or_default();
            for tok in &tweet.plain_tokens {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
    }
    freq.into_iter()
        .map(|(col, counts)| {
            let mut terms: Vec<(String, u64)> = counts
                .into_iter()
                .map(|(t, n)| (t.to_string(), n))
                .collect();
            terms.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            terms.truncate(top);
            (col, terms)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{normalize_text, tokenize_and_reduce, PreprocessConfig};
    use proptest::prelude::*;

    fn labels(text: &str) -> Vec<String> {
        let cfg = PreprocessConfig::default();
        let tokens = tokenize_and_reduce(&normalize_text(text, &cfg), &cfg);
        annotate_tokens(&tokens, &ConcernLexicon::default())
            .into_iter()
            .collect()
    }

    fn table(cells: Vec<Vec<u64>>) -> ContingencyTable {
        let rows = (0..cells.len()).map(|i| format!("r{i}")).collect();
        let cols = (0..cells[0].len()).map(|i| format!("c{i}")).collect();
        ContingencyTable::new(rows, cols, cells).unwrap()
    }

    #[test]
    fn stemmed_keyword_matches() {
        assert_eq!(labels("Get the vaccine!"), vec!["vaccination"]);
        assert_eq!(labels("vaccination drive"), vec!["vaccination"]);
        assert_eq!(labels("flights cancelled, no traveling"), vec!["travel"]);
        assert_eq!(
            labels("wash hands, this pandemic is real"),
            vec!["countermeasures:hygiene", "pandemic"]
        );
        assert!(labels("nothing relevant here").is_empty());
    }

    #[test]
    fn columns_merge_subconcerns() {
        let lex = ConcernLexicon::default();
        assert_eq!(
            lex.columns(),
            vec![
                "symptoms",
                "vaccination",
                "countermeasures",
                "travel",
                "pandemic"
            ]
        );
        let set: ConcernLabels = ["countermeasures:hygiene", "countermeasures:mask"]
            .map(String::from)
            .into();
        assert_eq!(merge_subconcerns(&set).len(), 1);
    }

    #[test]
    fn toml_keeps_order_and_stems() {
        let lex = ConcernLexicon::from_toml(
            "[concerns]\nzeta = [\"Flying\"]\nalpha = [\"masks\", \"mask\"]\n",
        )
        .unwrap();
        assert_eq!(lex.names().collect::<Vec<_>>(), vec!["zeta", "alpha"]);
        assert_eq!(lex.keywords("zeta").unwrap().iter().next().unwrap(), "fli");
        assert_eq!(lex.keywords("alpha").unwrap().len(), 1);
        assert!(ConcernLexicon::from_toml("[concerns]\nx = [\"two words\"]").is_err());
        assert!(ConcernLexicon::from_toml("[other]\nx = [\"a\"]").is_err());
    }

    #[test]
    fn single_cell_alignment() {
        let lex = ConcernLexicon::default();
        let set: ConcernLabels = ["travel".to_string()].into();
        let t = concern_alignment(&[set.clone(), set], &["a", "a"], &lex).unwrap();
        assert_eq!(t.total(), 2);
        assert_eq!(t.cells.iter().flatten().filter(|&&c| c > 0).count(), 1);
        let shares = t.shares();
        assert_eq!(shares[0][3], 1.0);
    }

    #[test]
    fn multi_label_counts_in_each_column() {
        let lex = ConcernLexicon::default();
        let both: ConcernLabels = [
            "travel",
            "pandemic",
            "countermeasures:mask",
            "countermeasures:hygiene",
        ]
        .map(String::from)
        .into();
        let t = concern_alignment(&[both], &["x"], &lex).unwrap();
        assert_eq!(t.cells[0], vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn empty_alignment_rejected() {
        let lex = ConcernLexicon::default();
        let none = ConcernLabels::new();
        assert!(matches!(
            concern_alignment(&[none], &["x"], &lex),
            Err(Error::EmptyContingency)
        ));
        assert!(concern_alignment::<&str>(&[ConcernLabels::new()], &[], &lex).is_err());
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_independence(&table(vec![vec![10, 10], vec![10, 10]]), 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_null);

        let r = chi_square_independence(&table(vec![vec![10, 20], vec![20, 10]]), 0.05).unwrap();
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.df, 1);
        assert!((r.p_value - 0.0098).abs() < 5e-5);
        assert!(r.reject_null);

        let r = chi_square_independence(&table(vec![vec![30, 10], vec![10, 30]]), 0.05).unwrap();
        assert!((r.statistic - 20.0).abs() < 1e-12);
        assert!((r.p_value - 7.7e-6).abs() < 1e-7);
    }

    #[test]
    fn degenerate_tables_rejected() {
        assert!(chi_square_independence(&table(vec![vec![1, 2]]), 0.05).is_err());
        assert!(matches!(
            chi_square_independence(&table(vec![vec![1, 0], vec![2, 0]]), 0.05),
            Err(Error::DegenerateTable(_))
        ));
    }

    #[test]
    fn empty_rows_and_columns_dropped() {
        let t = table(vec![vec![1, 0, 2], vec![0, 0, 0], vec![3, 0, 4]]).without_empty();
        assert_eq!(t.rows, vec!["r0", "r2"]);
        assert_eq!(t.cols, vec!["c0", "c2"]);
        assert_eq!(t.cells, vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn terms_ranked_by_frequency() {
        let mk = |plain: &[&str]| CleanTweet {
            id: "1".into(),
            author: "a".into(),
            created_at: "2020-02-01T00:00:00Z".parse().unwrap(),
            tokens: vec![],
            clean_text: String::new(),
            plain_tokens: plain.iter().map(|s| s.to_string()).collect(),
        };
        let tweets = vec![mk(&["mask", "wear"]), mk(&["mask", "buy"])];
        let set: ConcernLabels = ["countermeasures:mask".to_string()].into();
        let terms = concern_terms(&tweets, &[set.clone(), set], 2);
        assert_eq!(
            terms["countermeasures"],
            vec![("mask".to_string(), 2), ("buy".to_string(), 1)]
        );
    }

    fn cells_strategy() -> impl Strategy<Value = Vec<Vec<u64>>> {
        (2usize..5, 2usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(1u64..50, c), r)
        })
    }

    proptest! {
        #[test]
        fn statistic_scales_and_permutes(cells in cells_strategy(), m in 2u64..6) {
            let base = chi_square_independence(&table(cells.clone()), 0.05).unwrap();
            let scaled: Vec<Vec<u64>> = cells.iter().map(|r| r.iter().map(|x| x * m).collect()).collect();
            let s = chi_square_independence(&table(scaled), 0.05).unwrap();
            prop_assert!((s.statistic - m as f64 * base.statistic).abs() <= 1e-9 * s.statistic.max(1.0));

            let mut permuted: Vec<Vec<u64>> = cells.iter().rev().cloned().collect();
            for row in &mut permuted {
                row.rotate_left(1);
            }
            let p = chi_square_independence(&table(permuted), 0.05).unwrap();
            prop_assert!((p.statistic - base.statistic).abs() <= 1e-9 * base.statistic.max(1.0));
            prop_assert_eq!(base.reject_null, base.p_value < base.alpha);
        }

        #[test]
        fn annotation_ignores_token_order(mut toks in proptest::collection::vec("[a-z]{2,8}|vaccin|mask|travel", 0..12)) {
            let lex = ConcernLexicon::default();
            let a = annotate_tokens(&toks, &lex);
            toks.reverse();
            prop_assert_eq!(a, annotate_tokens(&toks, &lex));
        }
    }
}
