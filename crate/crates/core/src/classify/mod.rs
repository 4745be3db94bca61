//! Cluster classification from text, emotion and concern features.
//!
//! Every fitted transform (TF-IDF vocabulary and weights, standardizer,
//! SMOTE) sees training rows only; [`evaluate_fold`] is the single place
//! where training and validation rows meet, and it only scores the latter.

mod auc;
mod cv;
mod features;
mod forest;
mod matrix;
mod smote;
mod tfidf;

pub use auc::{binary_auc, macro_auc_ovr};
pub use cv::{
    cross_validate_ablation, evaluate_fold, format_auc, stratified_folds, AblationData, CvConfig,
    CvReport, CvRow, FeatureSet, FoldResult,
};
pub use features::{assemble_features, FeatureMatrix, Standardizer};
pub use forest::{train_random_forest, ForestConfig, ForestModel, Node, Tree, FORMAT_VERSION};
pub use matrix::Matrix;
pub use smote::{smote_oversample, SmoteConfig, SmoteOutput, Synthetic};
pub use tfidf::{fit_tfidf, TfidfConfig, TfidfModel};
