use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cowerage::pipeline::{
    load_record, record_path, replay, run_pipeline, simulate, AnalyzeArgs, Command, PruneArgs,
    ScoreArgs, SimulateArgs, SimulationKind,
};
use cowerage::pruning::{
    BucketMode, PruneConfig, PruningFraction, Strategy, WithinBucket, DEFAULT_BUCKET_SIZE,
    DEFAULT_SELECTION_EPOCH,
};
use cowerage::scores::MissingPolicy;
use cowerage::wer::NormalizationPolicy;

#[derive(Parser)]
#[command(
    name = "cowerage",
    version,
    about = "Training-WER based dataset pruning"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Average per-example WER at one epoch of a hypothesis log.
    Score {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SELECTION_EPOCH)]
        epoch: u32,
        /// Average incomplete examples over the runs they have instead of failing.
        #[arg(long)]
        skip_missing: bool,
        /// Compare tokens as written (no lowercasing or punctuation stripping).
        #[arg(long)]
        verbatim: bool,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Select a subset from a score matrix.
    Prune {
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Manifest, for --strategy length-cowerage or with --log.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Hypothesis log to score at --epoch instead of reading --scores.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Selection epoch (defaults to 8 when scoring a log).
        #[arg(long)]
        epoch: Option<u32>,
        #[arg(long, value_enum, default_value = "cowerage")]
        strategy: StrategyArg,
        #[arg(long)]
        fraction: PruningFraction,
        #[arg(long, default_value_t = DEFAULT_BUCKET_SIZE)]
        bucket_size: usize,
        #[arg(long, value_enum, default_value = "equal-count")]
        bucket_mode: BucketModeArg,
        #[arg(long, value_enum, default_value = "random")]
        within_bucket: WithinArg,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Phonemic-cover profile of a score matrix, optionally comparing two subsets.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, num_args = 2, value_names = ["SUBSET_A", "SUBSET_B"])]
        compare: Option<Vec<PathBuf>>,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Monte Carlo simulation on a synthetic WER population.
    Simulate {
        #[arg(long, value_enum, default_value = "tail-inclusion")]
        kind: KindArg,
        /// uniform:LO,HI | mixture:MEAN/SD/W;... | values:V1,V2,... | outlier | bimodal
        #[arg(long, default_value = "outlier")]
        dist: String,
        /// Population size (ignored for fixed populations).
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value = "0.9")]
        fraction: PruningFraction,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 10)]
        bucket_size: usize,
        #[arg(long, value_enum, default_value = "equal-count")]
        bucket_mode: BucketModeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        with_replacement: bool,
        /// Write the JSON report here as well as printing the table.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the reference TIMIT results and phonemic-cover examples.
    Report,
    /// Re-run a recorded command and check its output digest.
    Replay {
        /// A run record, or the output it describes.
        record: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    TopK,
    BottomK,
    Cowerage,
    OffsetWindow,
    LengthCowerage,
}

#[derive(Clone, Copy, ValueEnum)]
enum BucketModeArg {
    EqualCount,
    EqualWidth,
}

#[derive(Clone, Copy, ValueEnum)]
enum WithinArg {
    Random,
    Top,
    Bottom,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    TailInclusion,
    MeanVariance,
}

impl From<BucketModeArg> for BucketMode {
    fn from(m: BucketModeArg) -> Self {
        match m {
            BucketModeArg::EqualCount => BucketMode::EqualCount,
            BucketModeArg::EqualWidth => BucketMode::EqualWidth,
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Score {
            manifest,
            log,
            epoch,
            skip_missing,
            verbatim,
            output,
        } => Command::Score(ScoreArgs {
            manifest,
            log,
            epoch,
            missing: if skip_missing {
                MissingPolicy::Skip
            } else {
                MissingPolicy::Strict
            },
            normalization: if verbatim {
                NormalizationPolicy::VERBATIM
            } else {
                NormalizationPolicy::default()
            },
            output,
        }),
        Cmd::Prune {
            scores,
            manifest,
            log,
            epoch,
            strategy,
            fraction,
            bucket_size,
            bucket_mode,
            within_bucket,
            offset,
            window,
            seed,
            output,
        } => Command::Prune(PruneArgs {
            scores,
            manifest,
            log,
            epoch,
            config: PruneConfig {
                strategy: match strategy {
                    StrategyArg::Random => Strategy::Random,
                    StrategyArg::TopK => Strategy::TopK,
                    StrategyArg::BottomK => Strategy::BottomK,
                    StrategyArg::Cowerage => Strategy::Cowerage,
                    StrategyArg::OffsetWindow => Strategy::OffsetWindow,
                    StrategyArg::LengthCowerage => Strategy::LengthCowerage,
                },
                fraction,
                bucket_size,
                bucket_mode: bucket_mode.into(),
                within_bucket: match within_bucket {
                    WithinArg::Random => WithinBucket::Random,
                    WithinArg::Top => WithinBucket::Top,
                    WithinArg::Bottom => WithinBucket::Bottom,
                },
                seed,
                offset,
                window,
            },
            output,
        }),
        Cmd::Analyze {
            manifest,
            scores,
            compare,
            output,
        } => Command::Analyze(AnalyzeArgs {
            manifest,
            scores,
            compare: compare.map(|v| (v[0].clone(), v[1].clone())),
            output,
        }),
        Cmd::Simulate {
            kind,
            dist,
            n,
            fraction,
            k,
            bucket_size,
            bucket_mode,
            trials,
            seed,
            with_replacement,
            output,
        } => {
            let args = SimulateArgs {
                kind: match kind {
                    KindArg::TailInclusion => SimulationKind::TailInclusion,
                    KindArg::MeanVariance => SimulationKind::MeanVariance,
                },
                dist,
                population: n,
                fraction,
                k,
                bucket_size,
                bucket_mode: bucket_mode.into(),
                trials,
                seed,
                with_replacement,
                output: output.clone().unwrap_or_default(),
            };
            if output.is_some() {
                run_pipeline(&Command::Simulate(args.clone()))?;
            }
            print!("{}", simulate(&args)?.to_table());
            return Ok(());
        }
        Cmd::Report => {
            print!("{}", cowerage::fixtures::reference_report());
            return Ok(());
        }
        Cmd::Replay { record } => {
            let path = if record.to_string_lossy().ends_with(".run.json") {
                record
            } else {
                record_path(&record)
            };
            let rec = load_record(&path).with_context(|| format!("reading {}", path.display()))?;
            let outcome = replay(&rec)?;
            for input in &outcome.changed_inputs {
                eprintln!("input changed since the recorded run: {input}");
            }
            if !outcome.output_matches {
                bail!(
                    "output digest {} differs from recorded {}",
                    outcome.output_sha256,
                    rec.output_sha256
                );
            }
            if !outcome.is_identical() {
                bail!("inputs changed");
            }
            println!("{} reproduced ({})", rec.output, rec.output_sha256);
            return Ok(());
        }
    };
    let record = run_pipeline(&command)?;
    eprintln!("wrote {} (sha256 {})", record.output, record.output_sha256);
    Ok(())
}
