//! Appearance-free baselines.
//!
//! [`iou_tracker_plus`] is the online association engine with the appearance
//! term removed and a minimum box IoU required to continue a track.
//! [`seq_tracker`] is offline: it repeatedly pulls the highest-scoring chain of
//! detections on consecutive frames out of the whole video, Seq-NMS style.

use serde::{Deserialize, Serialize};

use crate::assoc::{
    finalize_entry, nms, run_tracker, Affinity, CueWeights, MemoryEntry, Prefilter, TrackerConfig, TrackerState,
};
use crate::io::{Detection, InstanceTrack, VideoDetections};
use crate::mask::{box_iou, BBox};
use crate::{Error, Result};

pub const DEFAULT_MIN_IOU: f64 = 0.3;

pub fn iou_tracker_plus(video: &VideoDetections, config: &TrackerConfig, min_iou: f64) -> Result<Vec<InstanceTrack>> {
    config.weights.validate()?;
    if !(0.0..=1.0).contains(&min_iou) {
        return Err(Error::Config(format!("min_iou must be in [0, 1], got {min_iou}")));
    }
    let state = TrackerState::with_affinity(video.video_id, *config, Affinity::IouGated { min_iou });
    run_tracker(state, video)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqConfig {
    /// Extraction stops once the best remaining chain is shorter than this
    /// (clamped to the video length).
    pub min_track_length: usize,
    pub weights: CueWeights,
    pub prefilter: Prefilter,
}

impl Default for SeqConfig {
    fn default() -> Self {
        Self {
            min_track_length: 8,
            weights: CueWeights::default(),
            prefilter: Prefilter::default(),
        }
    }
}

/// The parts of a detection the chain score looks at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainNode {
    pub bbox: BBox,
    pub category_id: u32,
    pub score: f64,
}

impl From<&Detection> for ChainNode {
    fn from(d: &Detection) -> Self {
        Self {
            bbox: d.bbox,
            category_id: d.category_id,
            score: d.score,
        }
    }
}

pub fn node_score(n: &ChainNode, w: &CueWeights) -> f64 {
    w.alpha * n.score.ln()
}

pub fn link_score(a: &ChainNode, b: &ChainNode, w: &CueWeights) -> f64 {
    let same = if a.category_id == b.category_id { 1.0 } else { 0.0 };
    w.beta * box_iou(&a.bbox, &b.bbox) + w.gamma * same
}

/// A chain: its score and `(frame, index)` members on consecutive frames.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    pub score: f64,
    pub members: Vec<(usize, usize)>,
}

/// Highest-scoring chain over nodes not marked `used`.
///
/// A chain `d0, ..., dk` scores `node(dk) + (score(d0..dk-1) + link(dk-1, dk))`
/// with `score(d0) = node(d0)`, evaluated in exactly that order. Ties keep the
/// chain found first: earliest end frame, lowest index, shortest prefix.
pub fn best_chain(frames: &[Vec<ChainNode>], used: &[Vec<bool>], w: &CueWeights) -> Option<Chain> {
    // value and predecessor index of the best chain ending at each node
    let mut value: Vec<Vec<f64>> = Vec::with_capacity(frames.len());
    let mut back: Vec<Vec<Option<usize>>> = Vec::with_capacity(frames.len());
    let mut best: Option<(f64, usize, usize)> = None;
    for (t, nodes) in frames.iter().enumerate() {
        let mut v_t = vec![f64::NEG_INFINITY; nodes.len()];
        let mut b_t = vec![None; nodes.len()];
        for (i, node) in nodes.iter().enumerate() {
            if used[t][i] {
                continue;
            }
            let mut prefix = 0.0;
            let mut from = None;
            if t > 0 {
                for (j, prev) in frames[t - 1].iter().enumerate() {
                    if used[t - 1][j] {
                        continue;
                    }
                    let cand = value[t - 1][j] + link_score(prev, node, w);
                    if cand > prefix {
                        prefix = cand;
                        from = Some(j);
                    }
                }
            }
            let v = node_score(node, w) + prefix;
            v_t[i] = v;
            b_t[i] = from;
            if best.is_none_or(|(bv, _, _)| v > bv) {
                best = Some((v, t, i));
            }
        }
        value.push(v_t);
        back.push(b_t);
    }
    let (score, mut t, mut i) = best?;
    let mut members = vec![(t, i)];
    while let Some(j) = back[t][i] {
        t -= 1;
        i = j;
        members.push((t, i));
    }
    members.reverse();
    Some(Chain { score, members })
}

pub fn seq_tracker(video: &VideoDetections, config: &SeqConfig) -> Result<Vec<InstanceTrack>> {
    config.weights.validate()?;
    if config.min_track_length == 0 {
        return Err(Error::Config("min_track_length must be at least 1".into()));
    }
    let num_frames = video.num_frames();
    // Surviving detections laid out on every frame index, gaps left empty.
    let mut dets: Vec<Vec<&Detection>> = vec![Vec::new(); num_frames];
    for frame in &video.frames {
        let kept = nms(&frame.detections, &config.prefilter)?;
        dets[frame.frame_index] = kept.into_iter().map(|i| &frame.detections[i]).collect();
    }
    let nodes: Vec<Vec<ChainNode>> = dets
        .iter()
        .map(|f| f.iter().map(|&d| ChainNode::from(d)).collect())
        .collect();
    let mut used: Vec<Vec<bool>> = nodes.iter().map(|f| vec![false; f.len()]).collect();
    let min_len = config.min_track_length.min(num_frames.max(1));

    let mut tracks = Vec::new();
    while let Some(chain) = best_chain(&nodes, &used, &config.weights) {
        if chain.members.len() < min_len {
            break;
        }
        let label = tracks.len() as u32 + 1;
        let mut entry: Option<MemoryEntry> = None;
        for &(t, i) in &chain.members {
            used[t][i] = true;
            let d = dets[t][i];
            match entry.as_mut() {
                None => entry = Some(MemoryEntry::new(label, d, t)),
                Some(e) => e.update(d, t),
            }
        }
        let entry = entry.expect("chains are non-empty");
        tracks.push(finalize_entry(u64::from(label), video.video_id, num_frames, &entry));
    }
    Ok(tracks)
}
