//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 2 when the library reports an error, 64 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::assoc::{CueWeights, Overlap, Prefilter, TrackerConfig};
use crate::baselines::SeqConfig;
use crate::io;
use crate::metrics::EvalConfig;
use crate::pipeline::{self, Method, OracleMode};
use crate::synth::SynthConfig;
use crate::Result;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "vistk",
    version,
    about = "Video instance segmentation evaluation and tracking"
)]
struct Cli {
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score results against ground truth and print AP/AR.
    Evaluate {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        results: PathBuf,
        /// Write the full report (per category, per threshold) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Link per-frame detections into instance tracks.
    Track {
        #[arg(long)]
        detections: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Masktrack)]
        method: MethodArg,
        #[command(flatten)]
        tracker: TrackerArgs,
        /// Minimum box IoU to continue a track (iou method).
        #[arg(long, default_value_t = 0.3)]
        min_iou: f64,
        /// Shortest chain kept (seq method).
        #[arg(long, default_value_t = 8)]
        min_track_length: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset: gt.json and detections.json.
    Synth {
        /// JSON generator settings; omitted fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Produce oracle results from ground truth.
    Oracle {
        #[arg(long, value_enum)]
        mode: OracleArg,
        #[arg(long)]
        gt: PathBuf,
        /// Required for the identity oracle.
        #[arg(long)]
        detections: Option<PathBuf>,
        #[command(flatten)]
        tracker: TrackerArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rerun association with each cue combination and compare AP.
    Ablate {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        detections: PathBuf,
        #[command(flatten)]
        tracker: TrackerArgs,
        /// Write the table as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct TrackerArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 10.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    nms_iou: f64,
    #[arg(long, default_value_t = 0.05)]
    score_floor: f64,
    #[arg(long, value_enum, default_value_t = OverlapArg::Box)]
    nms_overlap: OverlapArg,
}

impl TrackerArgs {
    fn config(&self) -> Result<TrackerConfig> {
        Ok(TrackerConfig {
            weights: CueWeights::new(self.alpha, self.beta, self.gamma)?,
            prefilter: Prefilter {
                nms_iou: self.nms_iou,
                score_floor: self.score_floor,
                overlap: match self.nms_overlap {
                    OverlapArg::Box => Overlap::Box,
                    OverlapArg::Mask => Overlap::Mask,
                },
            },
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Masktrack,
    Iou,
    Seq,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleArg {
    Image,
    Identity,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OverlapArg {
    Box,
    Mask,
}

/// Parses `args` (program name first) and runs the command, writing to the
/// process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Same as [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    if let Command::Oracle {
        mode: OracleArg::Identity,
        detections: None,
        ..
    } = cli.command
    {
        let _ = writeln!(stderr, "error: --mode identity requires --detections");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return EXIT_FAILURE;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
    }
}

/// Runs one command; returns what should go to stdout.
fn execute(command: Command) -> Result<String> {
    let mut text = String::new();
    match command {
        Command::Evaluate { gt, results, out } => {
            let report = pipeline::evaluate_files(&gt, &results, &EvalConfig::default())?;
            text = report.to_table();
            if let Some(out) = out {
                pipeline::write_report(&report, out)?;
            }
        }
        Command::Track {
            detections,
            method,
            tracker,
            min_iou,
            min_track_length,
            out,
        } => {
            let config = tracker.config()?;
            let method = match method {
                MethodArg::Masktrack => Method::MaskTrack(config),
                MethodArg::Iou => Method::IouTracker { config, min_iou },
                MethodArg::Seq => Method::SeqTracker(SeqConfig {
                    min_track_length,
                    weights: config.weights,
                    prefilter: config.prefilter,
                }),
            };
            let tracks = pipeline::track_file(&detections, &method)?;
            io::save_results(&tracks, &out)?;
        }
        Command::Synth { config, seed, out_dir } => {
            let mut cfg: SynthConfig = match config {
                Some(path) => io::read_json(&path)?,
                None => SynthConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            pipeline::synth_to_dir(&cfg, &out_dir)?;
        }
        Command::Oracle {
            mode,
            gt,
            detections,
            tracker,
            out,
        } => {
            let mode = match mode {
                OracleArg::Image => OracleMode::Image,
                OracleArg::Identity => OracleMode::Identity,
            };
            let tracks = pipeline::oracle_files(mode, &gt, detections.as_deref(), &tracker.config()?)?;
            io::save_results(&tracks, &out)?;
        }
        Command::Ablate {
            gt,
            detections,
            tracker,
            out,
        } => {
            let table = pipeline::ablate_files(&gt, &detections, &tracker.config()?, &EvalConfig::default())?;
            text = table.to_table();
            if let Some(out) = out {
                pipeline::write_report(&table, out)?;
            }
        }
    }
    Ok(text)
}
