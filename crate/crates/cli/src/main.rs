use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crisis_leaders::pipeline::fixture::{generate_fixture, write_jsonl, write_truth, FixtureSpec};
use crisis_leaders::pipeline::{emit_report, run_until, PipelineConfig, Stage};

/// Leader identification over tweet corpora: ranking, communities,
/// emotions, topics, concerns and a cluster classifier.
#[derive(Parser)]
#[command(name = "crisis-leaders", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read and filter the JSONL corpus.
    Ingest(RunArgs),
    /// Clean and tokenize tweets.
    Preprocess(RunArgs),
    /// Build the retweet graph and rank accounts.
    Graph(RunArgs),
    /// Split the leader subgraph into communities.
    Communities(RunArgs),
    /// Score emotions per cluster and month.
    Emotions(RunArgs),
    /// Sweep LDA topic counts.
    Topics(RunArgs),
    /// Label concerns and test their dependence on clusters.
    Concerns(RunArgs),
    /// Cross-validate the cluster classifier ablation.
    Classify(RunArgs),
    /// Write report tables from existing artifacts.
    Report(RunArgs),
    /// Run every stage, reusing valid artifacts.
    RunAll(RunArgs),
    /// Generate a synthetic corpus and its ground truth.
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input JSONL, overriding the config.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Global seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, default_value_t = 1000)]
    n_tweets: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving tweets.jsonl and truth.json.
    #[arg(long, default_value = "fixture")]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> crisis_leaders::Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(input) = &self.input {
            cfg.input = Some(input.clone());
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        Ok(cfg)
    }
}

fn run_stage(args: &RunArgs, last: Stage) -> Result<(), String> {
    let cfg = args.config().map_err(|e| format!("config: {e}"))?;
    let summary = run_until(&cfg, last).map_err(|e| e.to_string())?;
    for stage in &summary.cached {
        println!("{stage}: cached");
    }
    for stage in &summary.computed {
        println!("{stage}: computed");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    let (args, stage) = match &cli.command {
        Command::Ingest(a) => (a, Stage::Ingest),
        Command::Preprocess(a) => (a, Stage::Preprocess),
        Command::Graph(a) => (a, Stage::Graph),
        Command::Communities(a) => (a, Stage::Communities),
        Command::Emotions(a) => (a, Stage::Emotions),
        Command::Topics(a) => (a, Stage::Topics),
        Command::Concerns(a) => (a, Stage::Concerns),
        Command::Classify(a) => (a, Stage::Classify),
        Command::RunAll(a) => (a, Stage::Report),
        Command::Report(a) => {
            let cfg = a.config().map_err(|e| format!("config: {e}"))?;
            let files = emit_report(&cfg.out).map_err(|e| format!("stage report failed: {e}"))?;
            for f in files {
                println!("{}", cfg.out.join("reports").join(f).display());
            }
            return Ok(());
        }
        Command::Fixture(a) => {
            let mut spec = FixtureSpec {
                n_tweets: a.n_tweets,
                ..FixtureSpec::default()
            };
            if let Some(seed) = a.seed {
                spec.seed = seed;
            }
            let (tweets, truth) = generate_fixture(&spec).map_err(|e| format!("fixture: {e}"))?;
            std::fs::create_dir_all(&a.out).map_err(|e| format!("fixture: {e}"))?;
            write_jsonl(&a.out.join("tweets.jsonl"), &tweets)
                .map_err(|e| format!("fixture: {e}"))?;
            write_truth(&a.out.join("truth.json"), &truth).map_err(|e| format!("fixture: {e}"))?;
            println!("{} tweets written to {}", tweets.len(), a.out.display());
            return Ok(());
        }
    };
    run_stage(args, stage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
