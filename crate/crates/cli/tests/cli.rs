use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crisis-leaders"))
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fixture_subcommand_reproduces_bundled_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["fixture", "--n-tweets", "1000"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let fixtures = workspace().join("fixtures");
    assert_eq!(
        std::fs::read(dir.path().join("tweets.jsonl")).unwrap(),
        std::fs::read(fixtures.join("tweets_1k.jsonl")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir.path().join("truth.json")).unwrap(),
        std::fs::read(fixtures.join("truth.json")).unwrap()
    );
}

#[test]
fn missing_input_exits_2_naming_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let o = run(
        &["run-all", "--input", missing.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("stage ingest failed"), "{}", stderr(&o));
}

#[test]
fn report_without_artifacts_names_stage_to_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["report"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rerun stage ingest"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[graph]\ndampening = 0.9\n").unwrap();
    let o = run(&["ingest", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dampening"), "{}", stderr(&o));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn bundled_run_emits_reports_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = workspace().join("fixtures/pipeline.toml");
    let config = config.to_str().unwrap();

    // A stage prefix computes exactly that prefix.
    let o = run(&["graph", "--config", config], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("computed").count(), 3);

    let o = run(&["run-all", "--config", config], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).matches("cached").count(), 3);
    assert_eq!(std::fs::read_dir(out.join("artifacts")).unwrap().count(), 9);

    let reports = out.join("reports");
    let headers = [
        ("table1_ingest_stats.csv", "statistic,value"),
        (
            "emotions_by_cluster.csv",
            "group,anger,anticipation,disgust,fear,joy,sadness,surprise,trust",
        ),
        (
            "emotions_by_month.csv",
            "group,anger,anticipation,disgust,fear,joy,sadness,surprise,trust",
        ),
        ("wordcloud_terms.csv", "concern,term,frequency"),
        ("concern_alignment.csv", "cluster,concern,count,share"),
        ("lda_topics.csv", "topic,rank,word,probability"),
        ("lda_sweep.csv", "K,perplexity,mean_coherence"),
        (
            "table3_ablation.csv",
            "feature_set,mean_auc,std_auc,formatted",
        ),
    ];
    for (file, header) in headers {
        let rows = read_csv(&reports.join(file));
        assert_eq!(rows[0].join(","), header, "{file}");
        assert!(rows.len() > 1, "{file} has no data");
    }
    let chi: String = std::fs::read_to_string(reports.join("chi_square.json")).unwrap();
    for key in ["statistic", "df", "p_value", "alpha", "reject_null"] {
        assert!(chi.contains(key), "{key}");
    }

    let terms = read_csv(&reports.join("wordcloud_terms.csv"));
    for pair in terms[1..].windows(2) {
        if pair[0][0] == pair[1][0] {
            let (a, b): (u64, u64) = (pair[0][2].parse().unwrap(), pair[1][2].parse().unwrap());
            assert!(a >= b, "{pair:?}");
        }
    }
    let mut sums = std::collections::BTreeMap::<String, f64>::new();
    for row in &read_csv(&reports.join("concern_alignment.csv"))[1..] {
        *sums.entry(row[0].clone()).or_default() += row[3].parse::<f64>().unwrap();
    }
    for (cluster, s) in sums {
        // Shares are written with six decimals.
        assert!((s - 1.0).abs() < 1e-5, "{cluster}: {s}");
    }
    assert_eq!(read_csv(&reports.join("table3_ablation.csv")).len(), 5);

    // Deleting one artifact recomputes that stage alone.
    let before = std::fs::read(reports.join("table3_ablation.csv")).unwrap();
    std::fs::remove_file(out.join("artifacts/classify.json")).unwrap();
    let o = run(&["run-all", "--config", config], &out);
    assert!(o.status.success());
    let text = stdout(&o);
    let computed: Vec<&str> = text.lines().filter(|l| l.ends_with("computed")).collect();
    assert_eq!(computed, ["classify: computed"]);
    assert_eq!(
        std::fs::read(reports.join("table3_ablation.csv")).unwrap(),
        before
    );

    // The report subcommand rewrites the same files from artifacts.
    let o = run(&["report", "--config", config], &out);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(reports.join("table3_ablation.csv")).unwrap(),
        before
    );

    // A new seed invalidates every seeded stage.
    let o = run(&["run-all", "--config", config, "--seed", "7"], &out);
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("computed").count(), 9);
}
