use std::path::Path;

use crisis_leaders::corpus::RawTweet;
use crisis_leaders::pipeline::fixture::{generate_fixture, write_jsonl, FixtureSpec};
use crisis_leaders::pipeline::{
    read_artifact, run_pipeline, run_until, ClassifyData, CommunitiesData, PipelineConfig, Stage,
};

fn small_config(dir: &Path, tweets: &[RawTweet]) -> PipelineConfig {
    let input = dir.join("tweets.jsonl");
    write_jsonl(&input, tweets).unwrap();
    let text = format!(
        r#"
input = "{}"
out = "out"
seed = 5
[lda]
k = 4
iterations = 40
burn_in = 10
[classify]
folds = 2
repeats = 1
n_trees = 10
"#,
        input.display()
    );
    PipelineConfig::from_toml(&text, dir).unwrap()
}

fn fixture(n: usize) -> Vec<RawTweet> {
    generate_fixture(&FixtureSpec {
        n_tweets: n,
        ..FixtureSpec::default()
    })
    .unwrap()
    .0
}

#[test]
fn small_run_computes_then_caches_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), &fixture(300));
    let first = run_pipeline(&cfg).unwrap();
    assert_eq!(first.computed, Stage::ALL);
    let second = run_pipeline(&cfg).unwrap();
    assert_eq!(second.cached, Stage::ALL);
    assert!(second.computed.is_empty());

    let communities: CommunitiesData = read_artifact(&cfg.out, Stage::Communities).unwrap();
    assert_eq!(communities.best.num_communities, 4);
    let classify: ClassifyData = read_artifact(&cfg.out, Stage::Classify).unwrap();
    assert_eq!(classify.report.rows.len(), 4);
}

#[test]
fn changing_a_stage_config_recomputes_from_that_stage() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path(), &fixture(300));
    run_until(&cfg, Stage::Topics).unwrap();
    cfg.lda.k = Some(3);
    let s = run_until(&cfg, Stage::Concerns).unwrap();
    assert_eq!(
        s.cached,
        [
            Stage::Ingest,
            Stage::Preprocess,
            Stage::Graph,
            Stage::Communities,
            Stage::Emotions
        ]
    );
    assert_eq!(s.computed, [Stage::Topics, Stage::Concerns]);
}

#[test]
fn corpus_without_retweets_fails_in_communities() {
    let dir = tempfile::tempdir().unwrap();
    let mut tweets = fixture(200);
    for t in &mut tweets {
        t.retweeted_author = None;
    }
    let cfg = small_config(dir.path(), &tweets);
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.stage, Stage::Communities);
    assert!(err.to_string().starts_with("stage communities failed"));
    // Earlier artifacts are kept.
    assert!(Stage::Graph.artifact(&cfg.out).is_file());
    assert!(!Stage::Communities.artifact(&cfg.out).exists());
}

#[test]
fn input_edit_invalidates_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = fixture(300);
    let cfg = small_config(dir.path(), &tweets);
    run_until(&cfg, Stage::Preprocess).unwrap();
    write_jsonl(cfg.input.as_deref().unwrap(), &tweets[..299]).unwrap();
    let s = run_until(&cfg, Stage::Preprocess).unwrap();
    assert_eq!(s.computed, [Stage::Ingest, Stage::Preprocess]);
}
