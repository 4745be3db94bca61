use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    assemble_features, fit_tfidf, macro_auc_ovr, smote_oversample, train_random_forest,
    ForestConfig, Matrix, SmoteConfig, Standardizer, TfidfConfig,
};
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Feature combinations compared by the ablation, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    Text,
    TextConcerns,
    TextEmotions,
    TextEmotionsConcerns,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 4] = [
        FeatureSet::Text,
        FeatureSet::TextConcerns,
        FeatureSet::TextEmotions,
        FeatureSet::TextEmotionsConcerns,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Text => "text",
            FeatureSet::TextConcerns => "text+concerns",
            FeatureSet::TextEmotions => "text+emotions",
            FeatureSet::TextEmotionsConcerns => "text+emotions+concerns",
        }
    }

    pub fn uses_emotions(self) -> bool {
        matches!(
            self,
            FeatureSet::TextEmotions | FeatureSet::TextEmotionsConcerns
        )
    }

    pub fn uses_concerns(self) -> bool {
        matches!(
            self,
            FeatureSet::TextConcerns | FeatureSet::TextEmotionsConcerns
        )
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row-aligned inputs: row `i` of every field describes tweet `i`.
#[derive(Debug, Clone)]
pub struct AblationData {
    pub tokens: Vec<Vec<String>>,
    /// Emotion shares, one row per tweet.
    pub emotions: Matrix,
    /// Concern indicators, one row per tweet.
    pub concerns: Matrix,
    pub labels: Vec<usize>,
}

impl AblationData {
    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.tokens.len() != n || self.emotions.rows() != n || self.concerns.rows() != n {
            return Err(Error::RowMismatch(format!(
                "{} labels, {} token lists, {} emotion rows, {} concern rows",
                n,
                self.tokens.len(),
                self.emotions.rows(),
                self.concerns.rows()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Standardize the emotion and concern blocks.
    pub standardize: bool,
    pub tfidf: TfidfConfig,
    pub smote: SmoteConfig,
    pub forest: ForestConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 5,
            repeats: 3,
            seed: 0,
            standardize: true,
            tfidf: TfidfConfig::default(),
            smote: SmoteConfig::default(),
            forest: ForestConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub feature_set: FeatureSet,
    /// One AUC per repeat and fold, repeat-major.
    pub aucs: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `aucs`.
    pub std: f64,
    pub formatted: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub rows: Vec<CvRow>,
}

impl CvReport {
    pub fn row(&self, set: FeatureSet) -> Option<&CvRow> {
        self.rows.iter().find(|r| r.feature_set == set)
    }

    /// Write `feature_set,mean_auc,std_auc,formatted` rows.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["feature_set", "mean_auc", "std_auc", "formatted"])?;
        for r in &self.rows {
            w.write_record([
                r.feature_set.name().to_string(),
                format!("{:.6}", r.mean),
                format!("{:.6}", r.std),
                r.formatted.clone(),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Mean and spread as percentages, e.g. mean 0.9604 and spread 0.002
/// become `96.0(2)`: the mean to one decimal and the spread in tenths of a
/// percent.
pub fn format_auc(mean: f64, std: f64) -> String {
    format!("{:.1}({})", mean * 100.0, (std * 1000.0).round() as i64)
}

/// Fold id per row. Each class is shuffled and dealt round-robin, so fold
/// sizes per class differ by at most one.
pub fn stratified_folds(labels: &[usize], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut out = vec![0; labels.len()];
    for c in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(&mut rng);
        for (k, i) in members.into_iter().enumerate() {
            out[i] = k % folds;
        }
    }
    out
}

/// Outcome of training on `train` and scoring on `valid`.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub auc: f64,
    /// Vocabulary of the TF-IDF model fitted on the training rows.
    pub vocab: Vec<String>,
}

/// Fit TF-IDF, the standardizer, SMOTE and the forest on `train` only, then
/// score `valid` by macro one-vs-rest AUC.
pub fn evaluate_fold(
    data: &AblationData,
    train: &[usize],
    valid: &[usize],
    set: FeatureSet,
    config: &CvConfig,
    seed: u64,
) -> Result<FoldResult> {
    let pick = |idx: &[usize]| -> Vec<Vec<String>> {
        idx.iter().map(|&i| data.tokens[i].clone()).collect()
    };
    let (train_docs, valid_docs) = (pick(train), pick(valid));
    let tfidf = fit_tfidf(&train_docs, &config.tfidf)?;
    let labels = |idx: &[usize]| -> Vec<usize> { idx.iter().map(|&i| data.labels[i]).collect() };

    let block = |m: &Matrix, idx: &[usize], on: bool| on.then(|| m.select_rows(idx));
    let (e_tr, e_va) = (
        block(&data.emotions, train, set.uses_emotions()),
        block(&data.emotions, valid, set.uses_emotions()),
    );
    let (c_tr, c_va) = (
        block(&data.concerns, train, set.uses_concerns()),
        block(&data.concerns, valid, set.uses_concerns()),
    );
    let numeric: Vec<&Matrix> = e_tr.iter().chain(c_tr.iter()).collect();
    let scaler = if config.standardize && !numeric.is_empty() {
        Some(Standardizer::fit(&Matrix::hstack(&numeric)?)?)
    } else {
        None
    };

    let train_x = assemble_features(
        &tfidf.transform(&train_docs),
        e_tr.as_ref(),
        c_tr.as_ref(),
        &labels(train),
        scaler.as_ref(),
    )?;
    let valid_x = assemble_features(
        &tfidf.transform(&valid_docs),
        e_va.as_ref(),
        c_va.as_ref(),
        &labels(valid),
        scaler.as_ref(),
    )?;

    let smote_cfg = SmoteConfig {
        seed: derive_seed(seed, "smote"),
        ..config.smote
    };
    let balanced = smote_oversample(&train_x.x, &train_x.labels, &smote_cfg)?;
    let forest_cfg = ForestConfig {
        seed: derive_seed(seed, "forest"),
        ..config.forest
    };
    let model = train_random_forest(&balanced.x, &balanced.y, &forest_cfg)?;
    let mut proba = model.predict_proba(&valid_x.x)?;
    // classes absent from training get probability zero
    let classes = data.labels.iter().max().map_or(0, |&m| m + 1);
    for p in &mut proba {
        p.resize(classes, 0.0);
    }
    Ok(FoldResult {
        auc: macro_auc_ovr(&valid_x.labels, &proba)?,
        vocab: tfidf.vocab().to_vec(),
    })
}

/// Repeated stratified cross-validation of every feature set. Folds are
/// shared across feature sets so their scores are paired.
pub fn cross_validate_ablation(data: &AblationData, config: &CvConfig) -> Result<CvReport> {
    data.validate()?;
    if config.folds < 2 || config.repeats == 0 {
        return Err(Error::invalid("need at least 2 folds and 1 repeat"));
    }
    let mut jobs = Vec::new();
    for r in 0..config.repeats {
        let assign = stratified_folds(
            &data.labels,
            config.folds,
            derive_seed(config.seed, &format!("repeat{r}")),
        );
        for f in 0..config.folds {
            let (train, valid): (Vec<usize>, Vec<usize>) =
                (0..assign.len()).partition(|&i| assign[i] != f);
            let seed = derive_seed(config.seed, &format!("repeat{r}/fold{f}"));
            for set in FeatureSet::ALL {
                jobs.push((set, train.clone(), valid.clone(), seed));
            }
        }
    }
    let aucs: Vec<(FeatureSet, f64)> = jobs
        .par_iter()
        .map(|(set, train, valid, seed)| {
            evaluate_fold(data, train, valid, *set, config, *seed).map(|r| (*set, r.auc))
        })
        .collect::<Result<_>>()?;

    let rows = FeatureSet::ALL
        .iter()
        .map(|&set| {
            let values: Vec<f64> = aucs
                .iter()
                .filter(|(s, _)| *s == set)
                .map(|&(_, a)| a)
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = (values.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
            CvRow {
                feature_set: set,
                formatted: format_auc(mean, std),
                aucs: values,
                mean,
                std,
            }
        })
        .collect();
    Ok(CvReport { rows })
}
