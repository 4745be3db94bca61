use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{CvConfig, ForestConfig, SmoteConfig, TfidfConfig};
use crate::concerns::ConcernLexicon;
use crate::corpus::PreprocessConfig;
use crate::emotion::EmotionLexicon;
use crate::error::{Error, Result};
use crate::graph::PageRankConfig;
use crate::topics::LdaConfig;

/// Everything a pipeline run needs. Relative paths in a config file are
/// resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub ingest: IngestSection,
    pub preprocess: PreprocessSection,
    pub graph: GraphSection,
    pub emotions: EmotionSection,
    pub lda: LdaSection,
    /// Concern name to keyword list; empty means the default lexicon.
    pub concerns: toml::Table,
    pub chi_square: ChiSquareSection,
    pub classify: ClassifySection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            out: PathBuf::from("out"),
            seed: 0,
            ingest: IngestSection::default(),
            preprocess: PreprocessSection::default(),
            graph: GraphSection::default(),
            emotions: EmotionSection::default(),
            lda: LdaSection::default(),
            concerns: toml::Table::new(),
            chi_square: ChiSquareSection::default(),
            classify: ClassifySection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    /// Keep only tweets mentioning one of these; empty keeps all.
    pub keywords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSection {
    /// One word per line; `None` uses the bundled list.
    pub stopwords: Option<PathBuf>,
    /// `key<TAB>replacement` lines; `None` uses the bundled table.
    pub slang: Option<PathBuf>,
    pub spell_correction: bool,
    pub stemming: bool,
    pub min_token_length: usize,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection {
            stopwords: None,
            slang: None,
            spell_correction: false,
            stemming: true,
            min_token_length: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSection {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Size of the leader subgraph handed to community detection.
    pub leader_top_k: usize,
    pub max_communities: usize,
}

impl Default for GraphSection {
    fn default() -> Self {
        let pr = PageRankConfig::default();
        GraphSection {
            damping: pr.damping,
            tol: pr.tol,
            max_iter: pr.max_iter,
            leader_top_k: 1000,
            max_communities: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmotionSection {
    /// `word<TAB>emotion` lines; `None` uses the bundled lexicon.
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaSection {
    /// Fixed topic count; when absent the sweep picks by coherence.
    pub k: Option<usize>,
    pub k_min: usize,
    pub k_max: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub min_count: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        let d = LdaConfig::default();
        LdaSection {
            k: None,
            k_min: 3,
            k_max: 10,
            alpha: d.alpha,
            beta: d.beta,
            iterations: d.iterations,
            burn_in: d.burn_in,
            min_count: d.min_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChiSquareSection {
    pub alpha: f64,
}

impl Default for ChiSquareSection {
    fn default() -> Self {
        ChiSquareSection { alpha: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifySection {
    pub folds: usize,
    pub repeats: usize,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub smote_k: usize,
    pub min_df: usize,
    pub max_features: usize,
    pub standardize: bool,
    /// Communities with fewer tweets are left out of classification.
    pub min_class_tweets: usize,
}

impl Default for ClassifySection {
    fn default() -> Self {
        let cv = CvConfig::default();
        ClassifySection {
            folds: cv.folds,
            repeats: cv.repeats,
            n_trees: cv.forest.n_trees,
            max_depth: cv.forest.max_depth,
            min_leaf: cv.forest.min_leaf,
            smote_k: cv.smote.k_neighbors,
            min_df: cv.tfidf.min_df,
            max_features: cv.tfidf.max_features,
            standardize: cv.standardize,
            min_class_tweets: 10,
        }
    }
}

impl PipelineConfig {
    /// Parse a TOML config, resolving relative paths against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        resolve(&mut cfg.input);
        resolve(&mut cfg.preprocess.stopwords);
        resolve(&mut cfg.preprocess.slang);
        resolve(&mut cfg.emotions.lexicon);
        if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    /// Check ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let files = [
            &self.input,
            &self.preprocess.stopwords,
            &self.preprocess.slang,
            &self.emotions.lexicon,
        ];
        for path in files.into_iter().flatten() {
            if !path.is_file() {
                return Err(Error::Config(format!("file not found: {}", path.display())));
            }
        }
        let g = &self.graph;
        if !(g.damping > 0.0 && g.damping < 1.0) || g.tol <= 0.0 {
            return Err(Error::Config(
                "graph.damping must lie in (0, 1) and tol be positive".into(),
            ));
        }
        if g.leader_top_k == 0 || g.max_communities < 2 {
            return Err(Error::Config(
                "graph.leader_top_k must be positive and max_communities at least 2".into(),
            ));
        }
        let l = &self.lda;
        if l.k == Some(0) || l.k_min == 0 || l.k_min > l.k_max {
            return Err(Error::Config(
                "lda topic counts must be positive with k_min <= k_max".into(),
            ));
        }
        self.lda_template()
            .validate()
            .map_err(|e| Error::Config(format!("lda: {e}")))?;
        let c = &self.classify;
        if c.folds < 2 || c.repeats == 0 || c.n_trees == 0 || c.smote_k == 0 || c.min_leaf == 0 {
            return Err(Error::Config(
                "classify needs folds >= 2 and positive repeats, n_trees, smote_k, min_leaf".into(),
            ));
        }
        if !(self.chi_square.alpha > 0.0 && self.chi_square.alpha < 1.0) {
            return Err(Error::Config("chi_square.alpha must lie in (0, 1)".into()));
        }
        self.preprocess_config()?.validate()?;
        self.concern_lexicon()?;
        Ok(())
    }

    pub fn input_path(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Config("no input file given".into()))
    }

    pub fn preprocess_config(&self) -> Result<PreprocessConfig> {
        let mut cfg = PreprocessConfig::default();
        if let Some(p) = &self.preprocess.stopwords {
            cfg.stopwords = PreprocessConfig::load_stopwords(p)?;
        }
        if let Some(p) = &self.preprocess.slang {
            cfg.slang_map = PreprocessConfig::load_slang(p)?;
        }
        cfg.spell_correction = self.preprocess.spell_correction;
        cfg.stemming = self.preprocess.stemming;
        cfg.min_token_length = self.preprocess.min_token_length;
        Ok(cfg)
    }

    pub fn pagerank_config(&self) -> PageRankConfig {
        PageRankConfig {
            damping: self.graph.damping,
            tol: self.graph.tol,
            max_iter: self.graph.max_iter,
        }
    }

    pub fn emotion_lexicon(&self) -> Result<EmotionLexicon> {
        match &self.emotions.lexicon {
            Some(p) => EmotionLexicon::load(p),
            None => Ok(EmotionLexicon::bundled()),
        }
    }

    /// LDA settings without topic count or seed.
    pub fn lda_template(&self) -> LdaConfig {
        LdaConfig {
            k: self.lda.k.unwrap_or(self.lda.k_min),
            alpha: self.lda.alpha,
            beta: self.lda.beta,
            iterations: self.lda.iterations,
            burn_in: self.lda.burn_in,
            seed: 0,
            min_count: self.lda.min_count,
        }
    }

    pub fn topic_range(&self) -> std::ops::RangeInclusive<usize> {
        match self.lda.k {
            Some(k) => k..=k,
            None => self.lda.k_min..=self.lda.k_max,
        }
    }

    pub fn concern_lexicon(&self) -> Result<ConcernLexicon> {
        if self.concerns.is_empty() {
            Ok(ConcernLexicon::default())
        } else {
            ConcernLexicon::from_table(&self.concerns)
        }
    }

    pub fn cv_config(&self, seed: u64) -> CvConfig {
        let c = &self.classify;
        CvConfig {
            folds: c.folds,
            repeats: c.repeats,
            seed,
            standardize: c.standardize,
            tfidf: TfidfConfig {
                min_df: c.min_df,
                max_features: c.max_features,
            },
            smote: SmoteConfig {
                k_neighbors: c.smote_k,
                seed: 0,
            },
            forest: ForestConfig {
                n_trees: c.n_trees,
                max_depth: c.max_depth,
                min_leaf: c.min_leaf,
                max_features: None,
                seed: 0,
            },
        }
    }
}
