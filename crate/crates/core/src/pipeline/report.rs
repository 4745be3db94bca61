use std::path::Path;

use super::{
    read_artifact, ClassifyData, ConcernsData, EmotionsData, IngestData, PreprocessData, Stage,
    TopicsData,
};
use crate::emotion::write_aggregate_csv;
use crate::error::{Error, Result};
use crate::topics::{write_sweep_csv, write_topics_csv};

/// Files written to `<out>/reports`, in writing order.
pub const REPORT_FILES: [&str; 9] = [
    "table1_ingest_stats.csv",
    "emotions_by_cluster.csv",
    "emotions_by_month.csv",
    "wordcloud_terms.csv",
    "concern_alignment.csv",
    "chi_square.json",
    "lda_topics.csv",
    "lda_sweep.csv",
    "table3_ablation.csv",
];

/// Render the report tables from the stage artifacts under `out`.
/// Returns the written file names.
pub fn emit_report(out: &Path) -> Result<Vec<String>> {
    let ingest: IngestData = read_artifact(out, Stage::Ingest)?;
    let pre: PreprocessData = read_artifact(out, Stage::Preprocess)?;
    let emotions: EmotionsData = read_artifact(out, Stage::Emotions)?;
    let topics: TopicsData = read_artifact(out, Stage::Topics)?;
    let concerns: ConcernsData = read_artifact(out, Stage::Concerns)?;
    let classify: ClassifyData = read_artifact(out, Stage::Classify)?;

    let dir = out.join("reports");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let file = |name: &str| {
        let path = dir.join(name);
        std::fs::File::create(&path).map_err(|e| Error::io(&path, e))
    };

    let mut w = csv::Writer::from_writer(file(REPORT_FILES[0])?);
    w.write_record(["statistic", "value"])?;
    for (name, value) in ingest.stats.rows() {
        w.write_record([name.to_string(), value.to_string()])?;
    }
    w.write_record(["clean_tweets".to_string(), pre.tweets.len().to_string()])?;
    w.write_record(["empty_after_cleaning".to_string(), pre.dropped.to_string()])?;
    w.flush().map_err(csv::Error::from)?;

    write_aggregate_csv(&emotions.by_cluster, file(REPORT_FILES[1])?)?;
    write_aggregate_csv(&emotions.by_month, file(REPORT_FILES[2])?)?;

    let mut w = csv::Writer::from_writer(file(REPORT_FILES[3])?);
    w.write_record(["concern", "term", "frequency"])?;
    for (concern, terms) in &concerns.terms {
        for (term, n) in terms {
            w.write_record([concern.as_str(), term.as_str(), &n.to_string()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;

    concerns
        .table
        .write_alignment_csv(&dir.join(REPORT_FILES[4]))?;
    let text = serde_json::to_string_pretty(&concerns.chi_square)?;
    std::fs::write(dir.join(REPORT_FILES[5]), text + "\n")
        .map_err(|e| Error::io(dir.join(REPORT_FILES[5]), e))?;

    let selected = topics.sweep.row(topics.selected_k).ok_or_else(|| {
        Error::Config("topics artifact lacks its selected K; rerun stage topics".into())
    })?;
    write_topics_csv(&dir.join(REPORT_FILES[6]), &selected.topics)?;
    write_sweep_csv(&dir.join(REPORT_FILES[7]), &topics.sweep)?;

    classify.report.write_csv(&dir.join(REPORT_FILES[8]))?;
    Ok(REPORT_FILES.iter().map(|s| s.to_string()).collect())
}
