//! File-level entry points shared by the command line and scripting
//! front ends.

use std::path::Path;

use rayon::prelude::*;

use crate::ablation::{run_ablation, AblationTable, CueToggles};
use crate::assoc::{track_video, TrackerConfig};
use crate::baselines::{iou_tracker_plus, seq_tracker, SeqConfig};
use crate::io::{self, DetectionSet, InstanceTrack};
use crate::metrics::{evaluate, EvalConfig, EvalReport};
use crate::synth::{self, SynthConfig};
use crate::{Error, Result};

/// Association method for [`track_all`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    MaskTrack(TrackerConfig),
    IouTracker { config: TrackerConfig, min_iou: f64 },
    SeqTracker(SeqConfig),
}

/// Tracks every video (in parallel) and concatenates the tracks in video
/// order.
pub fn track_all(detections: &DetectionSet, method: &Method) -> Result<Vec<InstanceTrack>> {
    let per_video = detections
        .videos
        .par_iter()
        .map(|v| match method {
            Method::MaskTrack(cfg) => track_video(v, cfg),
            Method::IouTracker { config, min_iou } => iou_tracker_plus(v, config, *min_iou),
            Method::SeqTracker(cfg) => seq_tracker(v, cfg),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_video.into_iter().flatten().collect())
}

pub fn evaluate_files(gt: impl AsRef<Path>, results: impl AsRef<Path>, config: &EvalConfig) -> Result<EvalReport> {
    let gt = io::load_ground_truth(gt)?;
    let hyps = io::load_results(results)?;
    evaluate(&gt, &hyps, config)
}

pub fn track_file(detections: impl AsRef<Path>, method: &Method) -> Result<Vec<InstanceTrack>> {
    let dets = io::load_detections(detections)?;
    track_all(&dets, method)
}

pub const GT_FILE: &str = "gt.json";
pub const DETECTIONS_FILE: &str = "detections.json";

/// Writes `gt.json` and `detections.json` into `dir`, creating it if needed.
pub fn synth_to_dir(config: &SynthConfig, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let (gt, dets) = synth::generate(config)?;
    io::save_ground_truth(&gt, dir.join(GT_FILE))?;
    io::save_detections(&dets, dir.join(DETECTIONS_FILE))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    Image,
    Identity,
}

pub fn oracle_files(
    mode: OracleMode,
    gt: impl AsRef<Path>,
    detections: Option<&Path>,
    config: &TrackerConfig,
) -> Result<Vec<InstanceTrack>> {
    let gt = io::load_ground_truth(gt)?;
    match mode {
        OracleMode::Image => synth::image_oracle(&gt, config),
        OracleMode::Identity => {
            let path = detections.ok_or_else(|| Error::Argument("identity oracle needs a detections file".into()))?;
            let dets = io::load_detections(path)?;
            synth::identity_oracle(&gt, &dets)
        }
    }
}

pub fn ablate_files(
    gt: impl AsRef<Path>,
    detections: impl AsRef<Path>,
    config: &TrackerConfig,
    eval: &EvalConfig,
) -> Result<AblationTable> {
    let gt = io::load_ground_truth(gt)?;
    let dets = io::load_detections(detections)?;
    run_ablation(&gt, &dets, config, eval, &CueToggles::table_rows())
}

/// Writes any serializable value as pretty JSON, atomically.
pub fn write_report<T: serde::Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    io::write_json_atomic(path.as_ref(), value, true)
}
