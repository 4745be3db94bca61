//! Stage-by-stage orchestration with cached, fingerprinted artifacts.
//!
//! Stages run in a fixed order. Each writes `artifacts/<stage>.json`
//! carrying a fingerprint of its configuration, its seed and the
//! fingerprints before it; a later run reuses an artifact whose fingerprint
//! still matches. Outputs contain no timestamps, so equal configurations
//! give byte-identical files.

mod config;
pub mod fixture;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{cross_validate_ablation, AblationData, CvReport, Matrix};
use crate::concerns::{
    annotate_corpus, chi_square_independence, concern_alignment, concern_terms, merge_subconcerns,
    ChiSquareResult, ConcernLabels, ContingencyTable,
};
use crate::corpus::{ingest_jsonl_filtered, preprocess_corpus, CleanTweet, IngestStats, RawTweet};
use crate::emotion::{aggregate_emotions, score_emotions, EmotionProfile};
use crate::error::{Error, Result};
use crate::graph::{
    best_partition, build_retweet_graph, girvan_newman, io as graph_io, pagerank, select_leaders,
    CommunityPartition, PageRankVector,
};
use crate::seed::derive_seed;
use crate::topics::{sweep_topic_count, SweepReport};

pub use config::{
    ChiSquareSection, ClassifySection, EmotionSection, GraphSection, IngestSection, LdaSection,
    PipelineConfig, PreprocessSection,
};
pub use report::{emit_report, REPORT_FILES};

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Preprocess,
    Graph,
    Communities,
    Emotions,
    Topics,
    Concerns,
    Classify,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Preprocess,
        Stage::Graph,
        Stage::Communities,
        Stage::Emotions,
        Stage::Topics,
        Stage::Concerns,
        Stage::Classify,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Preprocess => "preprocess",
            Stage::Graph => "graph",
            Stage::Communities => "communities",
            Stage::Emotions => "emotions",
            Stage::Topics => "topics",
            Stage::Concerns => "concerns",
            Stage::Classify => "classify",
            Stage::Report => "report",
        }
    }

    /// Path of the stage artifact below the output directory.
    pub fn artifact(self, out: &Path) -> PathBuf {
        out.join("artifacts").join(format!("{}.json", self.name()))
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failure tagged with the stage that raised it.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub source: Error,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Which stages ran and which were loaded from their artifacts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub computed: Vec<Stage>,
    pub cached: Vec<Stage>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Artifact<T> {
    stage: Stage,
    fingerprint: String,
    data: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestData {
    pub stats: IngestStats,
    pub tweets: Vec<RawTweet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessData {
    pub tweets: Vec<CleanTweet>,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphData {
    pub nodes: usize,
    pub edges: usize,
    pub self_loops_dropped: usize,
    pub pagerank: PageRankVector,
    /// Top accounts by PageRank, best first.
    pub leaders: Vec<String>,
}

/// One step of the divisive sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnStep {
    pub num_communities: usize,
    pub modularity: f64,
    pub removed_edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunitiesData {
    /// Nodes of the leader subgraph, sorted.
    pub handles: Vec<String>,
    pub sequence: Vec<GnStep>,
    pub best: CommunityPartition,
}

impl CommunitiesData {
    /// Cluster name of every leader-subgraph account.
    pub fn cluster_of(&self) -> BTreeMap<&str, String> {
        self.handles
            .iter()
            .zip(&self.best.assignment)
            .map(|(h, &c)| (h.as_str(), cluster_name(c)))
            .collect()
    }
}

/// Report name of community `c`.
pub fn cluster_name(c: usize) -> String {
    format!("c{c}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionsData {
    /// Profile per preprocessed tweet.
    pub profiles: Vec<EmotionProfile>,
    pub by_cluster: BTreeMap<String, [f64; 8]>,
    pub by_month: BTreeMap<String, [f64; 8]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicsData {
    pub sweep: SweepReport,
    /// Topic count of highest mean coherence.
    pub selected_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcernsData {
    /// Labels per preprocessed tweet.
    pub labels: Vec<ConcernLabels>,
    pub columns: Vec<String>,
    /// Leader tweets by cluster and concern, all-zero rows and columns removed.
    pub table: ContingencyTable,
    pub chi_square: ChiSquareResult,
    /// Top unstemmed terms per concern column.
    pub terms: BTreeMap<String, Vec<(String, u64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyData {
    pub classes: Vec<String>,
    pub rows: usize,
    pub report: CvReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportData {
    pub files: Vec<String>,
}

/// Run every stage through the report.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    run_until(config, Stage::Report)
}

/// Run the stages up to and including `last`, reusing valid artifacts.
pub fn run_until(config: &PipelineConfig, last: Stage) -> Result<RunSummary, PipelineError> {
    let tag = |stage: Stage| move |source: Error| PipelineError { stage, source };
    config.validate().map_err(tag(Stage::Ingest))?;
    let mut run = Runner {
        config,
        out: config.out.clone(),
        summary: RunSummary::default(),
        chain: String::new(),
    };
    let ingest: IngestData = run.stage(Stage::Ingest, input_identity(config), |_| {
        let path = config.input_path()?;
        let (tweets, stats) = ingest_jsonl_filtered(path, &config.ingest.keywords)?;
        Ok(IngestData { stats, tweets })
    })?;
    if last == Stage::Ingest {
        return Ok(run.summary);
    }

    let pre_cfg = config.preprocess_config().map_err(tag(Stage::Preprocess))?;
    let pre: PreprocessData = run.stage(Stage::Preprocess, json(&pre_cfg), |_| {
        let out = preprocess_corpus(&ingest.tweets, &pre_cfg);
        Ok(PreprocessData {
            tweets: out.tweets,
            dropped: out.dropped,
        })
    })?;
    if last == Stage::Preprocess {
        return Ok(run.summary);
    }

    let graph: GraphData = run.stage(Stage::Graph, json(&config.graph), |out| {
        let g = build_retweet_graph(&ingest.tweets);
        let pr = pagerank(&g, &config.pagerank_config())?;
        let dir = out.join("graph");
        create_dir(&dir)?;
        graph_io::write_pagerank_csv(&pr, create(&dir.join("pagerank.csv"))?)?;
        graph_io::write_edges_csv(&g, create(&dir.join("edges.csv"))?)?;
        Ok(GraphData {
            nodes: g.node_count(),
            edges: g.edge_count(),
            self_loops_dropped: g.self_loops_dropped(),
            leaders: select_leaders(&pr, config.graph.leader_top_k),
            pagerank: pr,
        })
    })?;
    if last == Stage::Graph {
        return Ok(run.summary);
    }

    let communities: CommunitiesData =
        run.stage(Stage::Communities, json(&config.graph), |out| {
            detect_communities(
                &ingest.tweets,
                &graph.leaders,
                config.graph.max_communities,
                out,
            )
        })?;
    if last == Stage::Communities {
        return Ok(run.summary);
    }
    let clusters = communities.cluster_of();
    let tweet_cluster: Vec<Option<&String>> = pre
        .tweets
        .iter()
        .map(|t| clusters.get(t.author.as_str()))
        .collect();

    let lexicon_id = match &config.emotions.lexicon {
        Some(p) => file_digest(p).map_err(tag(Stage::Emotions))?,
        None => "bundled".to_string(),
    };
    let emotions: EmotionsData = run.stage(Stage::Emotions, lexicon_id, |_| {
        let lexicon = config.emotion_lexicon()?;
        let profiles: Vec<EmotionProfile> = pre
            .tweets
            .iter()
            .map(|t| score_emotions(&t.plain_tokens, &lexicon))
            .collect();
        let by_cluster = aggregate_emotions(
            tweet_cluster
                .iter()
                .zip(&profiles)
                .filter_map(|(c, p)| c.map(|c| (c.to_string(), *p))),
        );
        let by_month = aggregate_emotions(
            pre.tweets
                .iter()
                .zip(&profiles)
                .map(|(t, p)| (t.month(), *p)),
        );
        Ok(EmotionsData {
            profiles,
            by_cluster,
            by_month,
        })
    })?;
    if last == Stage::Emotions {
        return Ok(run.summary);
    }

    let _topics: TopicsData = run.stage(Stage::Topics, json(&config.lda), |_| {
        let docs: Vec<Vec<&str>> = pre
            .tweets
            .iter()
            .map(|t| t.tokens.iter().map(String::as_str).collect())
            .collect();
        let template = crate::topics::LdaConfig {
            seed: derive_seed(config.seed, Stage::Topics.name()),
            ..config.lda_template()
        };
        let sweep = sweep_topic_count(&docs, config.topic_range(), &template);
        let selected_k = match sweep.best_by_coherence() {
            Some(row) => row.k,
            None => {
                let detail = sweep
                    .failures
                    .first()
                    .map(|(k, e)| format!("K={k}: {e}"))
                    .unwrap_or_default();
                return Err(Error::invalid(format!("every topic fit failed ({detail})")));
            }
        };
        Ok(TopicsData { sweep, selected_k })
    })?;
    if last == Stage::Topics {
        return Ok(run.summary);
    }

    let concern_id = format!("{}|{}", json(&config.concerns), json(&config.chi_square));
    let concerns: ConcernsData = run.stage(Stage::Concerns, concern_id, |_| {
        let lexicon = config.concern_lexicon()?;
        let labels = annotate_corpus(&pre.tweets, &lexicon);
        let (leader_labels, leader_clusters): (Vec<ConcernLabels>, Vec<&str>) = labels
            .iter()
            .zip(&tweet_cluster)
            .filter_map(|(l, c)| c.map(|c| (l.clone(), c.as_str())))
            .unzip();
        let table = concern_alignment(&leader_labels, &leader_clusters, &lexicon)?.without_empty();
        let chi_square = chi_square_independence(&table, config.chi_square.alpha)?;
        let terms = concern_terms(&pre.tweets, &labels, 50);
        Ok(ConcernsData {
            columns: lexicon.columns(),
            labels,
            table,
            chi_square,
            terms,
        })
    })?;
    if last == Stage::Concerns {
        return Ok(run.summary);
    }

    let _classify: ClassifyData = run.stage(Stage::Classify, json(&config.classify), |_| {
        let data = ablation_rows(
            &pre.tweets,
            &tweet_cluster,
            &emotions.profiles,
            &concerns.labels,
            &concerns.columns,
            config.classify.min_class_tweets,
        )?;
        let seed = derive_seed(config.seed, Stage::Classify.name());
        let report = cross_validate_ablation(&data.0, &config.cv_config(seed))?;
        Ok(ClassifyData {
            classes: data.1,
            rows: data.0.labels.len(),
            report,
        })
    })?;
    if last == Stage::Classify {
        return Ok(run.summary);
    }

    let report_ready = REPORT_FILES
        .iter()
        .all(|f| config.out.join("reports").join(f).is_file());
    run.stage_if(Stage::Report, "v1".into(), report_ready, |out| {
        Ok(ReportData {
            files: emit_report(out)?,
        })
    })
    .map(|_: ReportData| ())?;
    Ok(run.summary)
}

struct Runner<'a> {
    config: &'a PipelineConfig,
    out: PathBuf,
    summary: RunSummary,
    /// Fingerprint of the previous stage.
    chain: String,
}

impl Runner<'_> {
    fn stage<T, F>(
        &mut self,
        stage: Stage,
        identity: String,
        compute: F,
    ) -> Result<T, PipelineError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce(&Path) -> Result<T>,
    {
        self.stage_if(stage, identity, true, compute)
    }

    /// Like `stage`, but a matching artifact only counts when `reusable`.
    fn stage_if<T, F>(
        &mut self,
        stage: Stage,
        identity: String,
        reusable: bool,
        compute: F,
    ) -> Result<T, PipelineError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce(&Path) -> Result<T>,
    {
        let tag = |source: Error| PipelineError { stage, source };
        let seed = self.config.seed;
        let fp = fingerprint(&[
            self.chain.as_bytes(),
            stage.name().as_bytes(),
            identity.as_bytes(),
            &derive_seed(seed, stage.name()).to_le_bytes(),
        ]);
        self.chain = fp.clone();
        let path = stage.artifact(&self.out);
        if reusable {
            if let Some(data) = load_artifact::<T>(&path, &fp) {
                log::info!("stage {stage}: cached");
                self.summary.cached.push(stage);
                return Ok(data);
            }
        }
        log::info!("stage {stage}: computing");
        create_dir(&self.out).map_err(tag)?;
        let data = compute(&self.out).map_err(tag)?;
        let artifact = Artifact {
            stage,
            fingerprint: fp,
            data,
        };
        create_dir(path.parent().expect("artifact dir")).map_err(tag)?;
        let text = serde_json::to_string(&artifact).map_err(|e| tag(e.into()))?;
        std::fs::write(&path, text).map_err(|e| tag(Error::io(&path, e)))?;
        self.summary.computed.push(stage);
        Ok(artifact.data)
    }
}

fn load_artifact<T: DeserializeOwned>(path: &Path, fp: &str) -> Option<T> {
    let text = std::fs::read_to_string(path).ok()?;
    let artifact: Artifact<T> = serde_json::from_str(&text).ok()?;
    (artifact.fingerprint == fp).then_some(artifact.data)
}

/// Load a stage's data from its artifact, whatever its fingerprint.
pub fn read_artifact<T: DeserializeOwned>(out: &Path, stage: Stage) -> Result<T> {
    let path = stage.artifact(out);
    let text = std::fs::read_to_string(&path).map_err(|_| {
        Error::Config(format!(
            "missing artifact {}; rerun stage {stage}",
            path.display()
        ))
    })?;
    let artifact: Artifact<T> = serde_json::from_str(&text)?;
    Ok(artifact.data)
}

fn fingerprint(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(fingerprint(&[&bytes]))
}

fn input_identity(config: &PipelineConfig) -> String {
    let digest = config
        .input
        .as_deref()
        .and_then(|p| file_digest(p).ok())
        .unwrap_or_default();
    format!("{digest}|{}", json(&config.ingest))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("config sections serialize")
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Girvan–Newman on the leader subgraph without isolated nodes, keeping the
/// partition of highest modularity.
fn detect_communities(
    tweets: &[RawTweet],
    leaders: &[String],
    max_communities: usize,
    out: &Path,
) -> Result<CommunitiesData> {
    let g = build_retweet_graph(tweets);
    let leader_idx: Vec<usize> = leaders.iter().filter_map(|h| g.index_of(h)).collect();
    let sub = g.induced_subgraph(&leader_idx);
    let und = sub.undirected();
    let connected: Vec<usize> = (0..sub.node_count())
        .filter(|&i| und.degree(i) > 0)
        .collect();
    let sub = sub.induced_subgraph(&connected);
    let und = sub.undirected();
    let sequence = girvan_newman(&und, max_communities)?;
    let best = best_partition(&sequence)
        .expect("sequence is never empty")
        .clone();

    let dir = out.join("graph");
    create_dir(&dir)?;
    graph_io::write_partition_csv(&sub, &best, create(&dir.join("partition.csv"))?)?;
    let mut w = csv::Writer::from_path(dir.join("gn_modularity.csv"))?;
    w.write_record(["num_communities", "modularity", "removed_edges"])?;
    for p in &sequence {
        w.write_record([
            p.num_communities.to_string(),
            format!("{:.6}", p.modularity),
            p.removed_edges.to_string(),
        ])?;
    }
    w.flush()
        .map_err(|e| Error::io(dir.join("gn_modularity.csv"), e))?;

    Ok(CommunitiesData {
        handles: sub.handles().to_vec(),
        sequence: sequence
            .iter()
            .map(|p| GnStep {
                num_communities: p.num_communities,
                modularity: p.modularity,
                removed_edges: p.removed_edges,
            })
            .collect(),
        best,
    })
}

/// Leader tweets of clusters with at least `min_tweets` tweets, with
/// emotion shares and concern indicators; returns the class names too.
fn ablation_rows(
    tweets: &[CleanTweet],
    clusters: &[Option<&String>],
    profiles: &[EmotionProfile],
    labels: &[ConcernLabels],
    columns: &[String],
    min_tweets: usize,
) -> Result<(AblationData, Vec<String>)> {
    let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for c in clusters.iter().flatten() {
        *sizes.entry(c.as_str()).or_default() += 1;
    }
    let classes: Vec<String> = sizes
        .into_iter()
        .filter(|&(_, n)| n >= min_tweets)
        .map(|(c, _)| c.to_string())
        .collect();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let class_of: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut data = AblationData {
        tokens: Vec::new(),
        emotions: Matrix::zeros(0, 8),
        concerns: Matrix::zeros(0, columns.len()),
        labels: Vec::new(),
    };
    for i in 0..tweets.len() {
        let Some(&class) = clusters[i].and_then(|c| class_of.get(c.as_str())) else {
            continue;
        };
        data.tokens.push(tweets[i].tokens.clone());
        data.emotions.push_row(&profiles[i].shares());
        let merged: BTreeSet<String> = merge_subconcerns(&labels[i]);
        let row: Vec<f64> = columns
            .iter()
            .map(|c| if merged.contains(c) { 1.0 } else { 0.0 })
            .collect();
        data.concerns.push_row(&row);
        data.labels.push(class);
    }
    Ok((data, classes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprints_separate_parts() {
        assert_ne!(fingerprint(&[b"ab", b"c"]), fingerprint(&[b"a", b"bc"]));
        assert_eq!(fingerprint(&[b"x"]).len(), 64);
    }

    #[test]
    fn stage_names_and_paths() {
        let names: Vec<&str> = Stage::ALL.iter().map(|s| s.name()).collect();
        assert_eq!(names[0], "ingest");
        assert_eq!(names[8], "report");
        assert_eq!(
            Stage::Classify.artifact(Path::new("/o")),
            Path::new("/o/artifacts/classify.json")
        );
    }

    #[test]
    fn missing_input_is_an_ingest_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            input: Some(dir.path().join("absent.jsonl")),
            out: dir.path().join("out"),
            ..Default::default()
        };
        let err = run_pipeline(&cfg).unwrap_err();
        assert_eq!(err.stage, Stage::Ingest);
        assert!(err.to_string().starts_with("stage ingest failed"));
    }
}
