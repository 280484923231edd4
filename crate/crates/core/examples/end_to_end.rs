//! Score a hypothesis log, prune, profile covers and replay, using the test
//! fixtures. Outputs go to a temporary directory.

use std::path::Path;

use cowerage::pipeline::{replay, run_pipeline, AnalyzeArgs, Command, PruneArgs, ScoreArgs};
use cowerage::pruning::{PruneConfig, PruningFraction};
use cowerage::scores::MissingPolicy;
use cowerage::wer::NormalizationPolicy;

fn main() -> anyhow::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let work = tempfile::tempdir()?;
    let scores = work.path().join("scores.jsonl");
    let subset = work.path().join("subset.jsonl");
    let analysis = work.path().join("analysis.json");

    run_pipeline(&Command::Score(ScoreArgs {
        manifest: fixtures.join("manifest.jsonl"),
        log: fixtures.join("hypotheses.jsonl"),
        epoch: 2,
        missing: MissingPolicy::Strict,
        normalization: NormalizationPolicy::default(),
        output: scores.clone(),
    }))?;
    print!("{}", std::fs::read_to_string(&scores)?);

    let record = run_pipeline(&Command::Prune(PruneArgs {
        scores: Some(scores.clone()),
        manifest: None,
        log: None,
        epoch: None,
        config: PruneConfig::cowerage(PruningFraction::new(1, 2)?, 2, 7),
        output: subset.clone(),
    }))?;
    print!("{}", std::fs::read_to_string(&subset)?);

    run_pipeline(&Command::Analyze(AnalyzeArgs {
        manifest: fixtures.join("manifest.jsonl"),
        scores,
        compare: None,
        output: analysis.clone(),
    }))?;
    println!("{}", std::fs::read_to_string(&analysis)?);

    let outcome = replay(&record)?;
    println!("replay identical: {}", outcome.is_identical());
    Ok(())
}
