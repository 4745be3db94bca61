use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaConfig {
    /// Number of topics.
    pub k: usize,
    /// Symmetric document–topic prior; `None` means `50 / k`.
    pub alpha: Option<f64>,
    /// Symmetric topic–word prior.
    pub beta: f64,
    /// Total Gibbs sweeps.
    pub iterations: usize,
    /// Sweeps discarded before estimates are averaged.
    pub burn_in: usize,
    pub seed: u64,
    /// Words seen fewer times than this across the corpus are dropped.
    pub min_count: usize,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            k: 5,
            alpha: None,
            beta: 0.01,
            iterations: 500,
            burn_in: 200,
            seed: 0,
            min_count: 2,
        }
    }
}

impl LdaConfig {
    pub fn with_k(k: usize) -> Self {
        LdaConfig {
            k,
            ..Default::default()
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.k as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("topic count must be positive"));
        }
        if self.alpha().is_nan() || self.alpha() <= 0.0 || self.beta.is_nan() || self.beta <= 0.0 {
            return Err(Error::invalid("alpha and beta must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::invalid(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }
}

/// State of a collapsed Gibbs LDA chain and its averaged estimates.
#[derive(Debug, Clone)]
pub struct TopicModel {
    pub(crate) vocab: Vec<String>,
    pub(crate) word_index: HashMap<String, usize>,
    pub(crate) k: usize,
    pub(crate) alpha: f64,
    pub(crate) beta: f64,
    /// Word ids per document (pruned words removed).
    pub(crate) docs: Vec<Vec<usize>>,
    /// Topic label per token, aligned with `docs`.
    pub(crate) assignments: Vec<Vec<usize>>,
    /// K x V, row-major.
    pub(crate) topic_word: Vec<u32>,
    /// D x K, row-major.
    pub(crate) doc_topic: Vec<u32>,
    pub(crate) topic_totals: Vec<u32>,
    /// K x V averaged topic–word distributions.
    pub(crate) phi: Vec<f64>,
    /// D x K averaged document–topic distributions.
    pub(crate) theta: Vec<f64>,
    pub(crate) samples: usize,
    pub(crate) log_likelihood: Vec<f64>,
}

/// Fit LDA by collapsed Gibbs sampling.
pub fn fit_lda<S: AsRef<str>>(docs: &[Vec<S>], config: &LdaConfig) -> Result<TopicModel> {
    fit_lda_observed(docs, config, |_, _| {})
}

/// [`fit_lda`] with a callback after every sweep, given the sweep number
/// (from 1) and the current state.
pub fn fit_lda_observed<S, F>(
    docs: &[Vec<S>],
    config: &LdaConfig,
    mut observe: F,
) -> Result<TopicModel>
where
    S: AsRef<str>,
    F: FnMut(usize, &TopicModel),
{
    config.validate()?;
    let mut model = TopicModel::init(docs, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    model.random_start(&mut rng);
    let mut probs = vec![0.0; model.k];
    for sweep in 1..=config.iterations {
        model.sweep(&mut rng, &mut probs);
        if sweep > config.burn_in {
            model.accumulate_estimates();
        }
        let ll = model.current_log_likelihood();
        model.log_likelihood.push(ll);
        observe(sweep, &model);
    }
    model.finish_estimates();
    Ok(model)
}

impl TopicModel {
    fn init<S: AsRef<str>>(docs: &[Vec<S>], config: &LdaConfig) -> Result<Self> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            for w in doc {
                *counts.entry(w.as_ref()).or_default() += 1;
            }
        }
        let vocab: Vec<String> = counts
            .into_iter()
            .filter(|&(_, c)| c >= config.min_count)
            .map(|(w, _)| w.to_string())
            .collect();
        let word_index: HashMap<String, usize> = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        let ids: Vec<Vec<usize>> = docs
            .iter()
            .map(|d| {
                d.iter()
                    .filter_map(|w| word_index.get(w.as_ref()).copied())
                    .collect()
            })
            .collect();
        if ids.iter().all(Vec::is_empty) {
            return Err(Error::EmptyCorpus);
        }
        let (k, v, d) = (config.k, vocab.len(), ids.len());
        Ok(TopicModel {
            vocab,
            word_index,
            k,
            alpha: config.alpha(),
            beta: config.beta,
            assignments: ids.iter().map(|doc| vec![0; doc.len()]).collect(),
            docs: ids,
            topic_word: vec![0; k * v],
            doc_topic: vec![0; d * k],
            topic_totals: vec![0; k],
            phi: vec![0.0; k * v],
            theta: vec![0.0; d * k],
            samples: 0,
            log_likelihood: Vec::new(),
        })
    }

    fn random_start(&mut self, rng: &mut ChaCha8Rng) {
        let (k, v) = (self.k, self.vocab.len());
        for (d, doc) in self.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let z = rng.gen_range(0..k);
                self.assignments[d][i] = z;
                self.topic_word[z * v + w] += 1;
                self.doc_topic[d * k + z] += 1;
                self.topic_totals[z] += 1;
            }
        }
    }

    fn sweep(&mut self, rng: &mut ChaCha8Rng, probs: &mut [f64]) {
        let (k, v) = (self.k, self.vocab.len());
        let vbeta = v as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.assignments[d][i];
                self.topic_word[old * v + w] -= 1;
                self.doc_topic[d * k + old] -= 1;
                self.topic_totals[old] -= 1;

                let mut total = 0.0;
                for (t, slot) in probs.iter_mut().enumerate() {
                    let p = (self.doc_topic[d * k + t] as f64 + self.alpha)
                        * (self.topic_word[t * v + w] as f64 + self.beta)
                        / (self.topic_totals[t] as f64 + vbeta);
                    total += p;
                    *slot = total;
                }
                let u = rng.gen::<f64>() * total;
                let new = probs.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.assignments[d][i] = new;
                self.topic_word[new * v + w] += 1;
                self.doc_topic[d * k + new] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    fn point_phi(&self, t: usize, w: usize) -> f64 {
        let v = self.vocab.len();
        (self.topic_word[t * v + w] as f64 + self.beta)
            / (self.topic_totals[t] as f64 + v as f64 * self.beta)
    }

    fn point_theta(&self, d: usize, t: usize) -> f64 {
        (self.doc_topic[d * self.k + t] as f64 + self.alpha)
            / (self.docs[d].len() as f64 + self.k as f64 * self.alpha)
    }

    fn accumulate_estimates(&mut self) {
        let v = self.vocab.len();
        for t in 0..self.k {
            for w in 0..v {
                self.phi[t * v + w] += self.point_phi(t, w);
            }
        }
        for d in 0..self.docs.len() {
            for t in 0..self.k {
                self.theta[d * self.k + t] += self.point_theta(d, t);
            }
        }
        self.samples += 1;
    }

    fn finish_estimates(&mut self) {
        let n = self.samples.max(1) as f64;
        self.phi.iter_mut().for_each(|x| *x /= n);
        self.theta.iter_mut().for_each(|x| *x /= n);
    }

    /// Token log-likelihood `sum log sum_k theta_dk phi_kw` at the current state.
    fn current_log_likelihood(&self) -> f64 {
        let mut ll = 0.0;
        for (d, doc) in self.docs.iter().enumerate() {
            for &w in doc {
                let p: f64 = (0..self.k)
                    .map(|t| self.point_theta(d, t) * self.point_phi(t, w))
                    .sum();
                ll += p.ln();
            }
        }
        ll
    }

    pub fn num_topics(&self) -> usize {
        self.k
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.word_index.get(word).copied()
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn topic_word_count(&self, topic: usize, word: usize) -> u32 {
        self.topic_word[topic * self.vocab.len() + word]
    }

    pub fn doc_topic_count(&self, doc: usize, topic: usize) -> u32 {
        self.doc_topic[doc * self.k + topic]
    }

    pub fn topic_total(&self, topic: usize) -> u32 {
        self.topic_totals[topic]
    }

    /// In-vocabulary token count of a document.
    pub fn doc_len(&self, doc: usize) -> usize {
        self.docs[doc].len()
    }

    pub fn assignments(&self, doc: usize) -> &[usize] {
        &self.assignments[doc]
    }

    /// Topic–word distribution of `topic`, averaged over post-burn-in sweeps.
    pub fn phi(&self, topic: usize) -> &[f64] {
        let v = self.vocab.len();
        &self.phi[topic * v..(topic + 1) * v]
    }

    pub fn theta(&self, doc: usize) -> &[f64] {
        &self.theta[doc * self.k..(doc + 1) * self.k]
    }

    /// Log-likelihood after each sweep.
    pub fn log_likelihood_trace(&self) -> &[f64] {
        &self.log_likelihood
    }

    /// True when every count matrix agrees with the token assignments.
    pub fn counts_consistent(&self) -> bool {
        let (k, v) = (self.k, self.vocab.len());
        for t in 0..k {
            let row: u64 = self.topic_word[t * v..(t + 1) * v]
                .iter()
                .map(|&c| c as u64)
                .sum();
            if row != self.topic_totals[t] as u64 {
                return false;
            }
        }
        let mut tw = vec![0u32; k * v];
        for (d, doc) in self.docs.iter().enumerate() {
            let mut dt = vec![0u32; k];
            for (&w, &z) in doc.iter().zip(&self.assignments[d]) {
                dt[z] += 1;
                tw[z * v + w] += 1;
            }
            if dt[..] != self.doc_topic[d * k..(d + 1) * k] {
                return false;
            }
        }
        tw == self.topic_word
    }

    /// The `n` most probable words of `topic` with their probabilities,
    /// ties broken alphabetically.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<(String, f64)> {
        assert!(topic < self.k, "topic {topic} out of range");
        let phi = self.phi(topic);
        let mut order: Vec<usize> = (0..self.vocab.len()).collect();
        order.sort_by(|&a, &b| {
            phi[b]
                .partial_cmp(&phi[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| self.vocab[a].cmp(&self.vocab[b]))
        });
        order
            .into_iter()
            .take(n)
            .map(|w| (self.vocab[w].clone(), phi[w]))
            .collect()
    }

    /// Perplexity of the training documents under the averaged estimates.
    pub fn perplexity(&self) -> Result<f64> {
        let mut ll = 0.0;
        let mut tokens = 0usize;
        for (d, doc) in self.docs.iter().enumerate() {
            let theta = self.theta(d);
            for &w in doc {
                let p: f64 = (0..self.k)
                    .map(|t| theta[t] * self.phi[t * self.vocab.len() + w])
                    .sum();
                ll += p.ln();
                tokens += 1;
            }
        }
        if tokens == 0 {
            return Err(Error::NoScorableTokens);
        }
        Ok((-ll / tokens as f64).exp())
    }

    /// Perplexity of unseen documents. Topic mixtures are folded in with
    /// `sweeps` Gibbs sweeps against the frozen topic–word estimates;
    /// out-of-vocabulary tokens are skipped.
    pub fn heldout_perplexity<S: AsRef<str>>(
        &self,
        docs: &[Vec<S>],
        sweeps: usize,
        seed: u64,
    ) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = self.vocab.len();
        let k = self.k;
        let mut probs = vec![0.0; k];
        let mut ll = 0.0;
        let mut tokens = 0usize;
        for doc in docs {
            let ids: Vec<usize> = doc
                .iter()
                .filter_map(|w| self.word_id(w.as_ref()))
                .collect();
            if ids.is_empty() {
                continue;
            }
            let mut counts = vec![0u32; k];
            let mut z: Vec<usize> = ids
                .iter()
                .map(|_| {
                    let t = rng.gen_range(0..k);
                    counts[t] += 1;
                    t
                })
                .collect();
            for _ in 0..sweeps {
                for (i, &w) in ids.iter().enumerate() {
                    counts[z[i]] -= 1;
                    let mut total = 0.0;
                    for t in 0..k {
                        total += (counts[t] as f64 + self.alpha) * self.phi[t * v + w];
                        probs[t] = total;
                    }
                    let u = rng.gen::<f64>() * total;
                    z[i] = probs.iter().position(|&c| u < c).unwrap_or(k - 1);
                    counts[z[i]] += 1;
                }
            }
            let norm = ids.len() as f64 + k as f64 * self.alpha;
            for &w in &ids {
                let p: f64 = (0..k)
                    .map(|t| (counts[t] as f64 + self.alpha) / norm * self.phi[t * v + w])
                    .sum();
                ll += p.ln();
                tokens += 1;
            }
        }
        if tokens == 0 {
            return Err(Error::NoScorableTokens);
        }
        Ok((-ll / tokens as f64).exp())
    }
}
