use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfidfConfig {
    /// Terms in fewer documents are dropped.
    pub min_df: usize,
    /// Keep at most this many terms, the most frequent by document count.
    pub max_features: usize,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        TfidfConfig {
            min_df: 2,
            max_features: 20_000,
        }
    }
}

/// Vocabulary and smoothed inverse document frequencies,
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    idf: Vec<f64>,
}

pub fn fit_tfidf<S: AsRef<str>>(docs: &[Vec<S>], config: &TfidfConfig) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let uniq: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for t in uniq {
            *df.entry(t).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = df
        .into_iter()
        .filter(|&(_, d)| d >= config.min_df)
        .collect();
    if kept.len() > config.max_features {
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        kept.truncate(config.max_features);
        kept.sort_by(|a, b| a.0.cmp(b.0));
    }
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let n = docs.len() as f64;
    let vocab: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let idf = kept
        .iter()
        .map(|&(_, d)| ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0)
        .collect();
    let index = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(TfidfModel { vocab, index, idf })
}

impl TfidfModel {
    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.index.get(term).map(|&i| self.idf[i])
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Raw counts times idf, each row scaled to unit L2 norm. Rows without
    /// known terms stay zero.
    pub fn transform<S: AsRef<str>>(&self, docs: &[Vec<S>]) -> Matrix {
        let mut m = Matrix::zeros(docs.len(), self.vocab.len());
        for (i, doc) in docs.iter().enumerate() {
            let row = m.row_mut(i);
            for t in doc {
                if let Some(&j) = self.index.get(t.as_ref()) {
                    row[j] += self.idf[j];
                }
            }
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(min_df: usize) -> TfidfConfig {
        TfidfConfig {
            min_df,
            ..Default::default()
        }
    }

    #[test]
    fn ubiquitous_term_has_unit_idf() {
        let docs = vec![vec!["a", "b"], vec!["a"], vec!["a", "c"]];
        let m = fit_tfidf(&docs, &cfg(1)).unwrap();
        assert_eq!(m.idf("a"), Some(1.0));
        assert!(m.idf("b").unwrap() > 1.0);
    }

    #[test]
    fn single_doc_weights() {
        let docs = vec![vec!["a", "a", "b"]];
        let m = fit_tfidf(&docs, &cfg(1)).unwrap();
        let x = m.transform(&docs);
        // both idfs are 1 for a single document
        let norm = 5f64.sqrt();
        assert!((x.get(0, 0) - 2.0 / norm).abs() < 1e-12);
        assert!((x.get(0, 1) - 1.0 / norm).abs() < 1e-12);
    }

    #[test]
    fn oov_row_is_zero_and_rows_unit() {
        let docs = vec![vec!["a", "b"], vec!["a", "b", "b"], vec!["c"]];
        let m = fit_tfidf(&docs, &cfg(2)).unwrap();
        assert_eq!(m.vocab(), &["a", "b"]);
        let x = m.transform(&[vec!["zzz"], vec!["b", "a"]]);
        assert_eq!(x.row(0), &[0.0, 0.0]);
        let n: f64 = x.row(1).iter().map(|v| v * v).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pruning_errors_and_caps() {
        let docs = vec![vec!["a"], vec!["b"]];
        assert!(matches!(
            fit_tfidf(&docs, &cfg(2)),
            Err(Error::EmptyVocabulary)
        ));
        let docs = vec![vec!["a", "b", "c"], vec!["a", "b"], vec!["a"]];
        let capped = fit_tfidf(
            &docs,
            &TfidfConfig {
                min_df: 1,
                max_features: 2,
            },
        )
        .unwrap();
        assert_eq!(capped.vocab(), &["a", "b"]);
    }
}
