//! Online association of per-frame detections into instance tracks.
//!
//! An external memory holds, for each identified instance, its most recent
//! appearance feature, box and category. A new detection `i` is scored
//! against every stored instance `n` by
//!
//! ```text
//! v_i(n) = log p_i(n) + alpha * log s_i + beta * IoU(b_i, b_n) + gamma * [c_i == c_n]
//! ```
//!
//! where `p_i` is a softmax over the feature dot products with a fixed zero
//! logit reserved for "new instance". Starting a new instance scores
//! `log p_i(0) + alpha * log s_i`. When several detections of a frame want the
//! same instance, the highest-scoring one keeps it and the others fall back to
//! their next best option.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::io::{Detection, FrameDetections, InstanceTrack, VideoDetections};
use crate::mask::{box_iou, mask_iou, BBox, RleMask};
use crate::{Error, Result};

/// Weights of the detection-score, box-IoU and category terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CueWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for CueWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            gamma: 10.0,
        }
    }
}

impl CueWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let w = Self { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Overlap measure used by non-maximum suppression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Overlap {
    #[default]
    Box,
    Mask,
}

/// Per-frame filtering applied before association.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prefilter {
    pub nms_iou: f64,
    pub score_floor: f64,
    pub overlap: Overlap,
}

impl Default for Prefilter {
    fn default() -> Self {
        Self {
            nms_iou: 0.5,
            score_floor: 0.05,
            overlap: Overlap::Box,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub weights: CueWeights,
    pub prefilter: Prefilter,
}

/// How candidate labels are scored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Affinity {
    /// Appearance probability plus the weighted cues.
    Appearance,
    /// Weighted cues only; existing labels need box IoU of at least `min_iou`
    /// and a new label is taken only when none qualifies.
    IouGated { min_iou: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryEntry {
    /// 1-based, in creation order.
    pub label: u32,
    pub feature: Vec<f64>,
    pub last_box: BBox,
    pub category_id: u32,
    pub score_history: Vec<f64>,
    pub category_history: Vec<u32>,
    pub masks: BTreeMap<usize, RleMask>,
    pub boxes: BTreeMap<usize, BBox>,
}

impl MemoryEntry {
    pub(crate) fn new(label: u32, det: &Detection, frame: usize) -> Self {
        Self {
            label,
            feature: det.feature.clone(),
            last_box: det.bbox,
            category_id: det.category_id,
            score_history: vec![det.score],
            category_history: vec![det.category_id],
            masks: BTreeMap::from([(frame, det.mask.clone())]),
            boxes: BTreeMap::from([(frame, det.bbox)]),
        }
    }

    pub(crate) fn update(&mut self, det: &Detection, frame: usize) {
        self.feature.clone_from(&det.feature);
        self.last_box = det.bbox;
        self.category_id = det.category_id;
        self.score_history.push(det.score);
        self.category_history.push(det.category_id);
        self.masks.insert(frame, det.mask.clone());
        self.boxes.insert(frame, det.bbox);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Log-probabilities over labels `0..=N`, label 0 meaning "new instance".
pub fn assign_log_probabilities<'a>(query: &[f64], memory: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    let mut logits = vec![0.0];
    for (n, f) in memory.into_iter().enumerate() {
        if f.len() != query.len() {
            return Err(Error::Argument(format!(
                "feature dimension {} does not match memory entry {} of dimension {}",
                query.len(),
                n + 1,
                f.len()
            )));
        }
        logits.push(dot(query, f));
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
    Ok(logits.into_iter().map(|l| l - lse).collect())
}

/// Probabilities over labels `0..=N`; see [`assign_log_probabilities`].
pub fn assign_probabilities<'a>(query: &[f64], memory: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    Ok(assign_log_probabilities(query, memory)?
        .into_iter()
        .map(f64::exp)
        .collect())
}

/// Cue score for assigning `det` to `entry` given the log of the appearance
/// probability.
pub fn log_combined_score(log_p: f64, det: &Detection, entry: &MemoryEntry, w: &CueWeights) -> f64 {
    let same = if det.category_id == entry.category_id { 1.0 } else { 0.0 };
    log_p + w.alpha * det.score.ln() + w.beta * box_iou(&det.bbox, &entry.last_box) + w.gamma * same
}

pub fn combined_score(p: f64, det: &Detection, entry: &MemoryEntry, w: &CueWeights) -> f64 {
    log_combined_score(p.ln(), det, entry, w)
}

/// Score of opening a new instance for `det`.
pub fn new_instance_score(log_p0: f64, det: &Detection, w: &CueWeights) -> f64 {
    log_p0 + w.alpha * det.score.ln()
}

/// Class-aware greedy NMS. Drops detections below the score floor, then
/// visits the rest by descending score and suppresses any detection whose
/// overlap with an already kept one of the same category exceeds the
/// threshold. Returns kept indices in visiting order.
pub fn nms(detections: &[Detection], filter: &Prefilter) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..detections.len())
        .filter(|&i| detections[i].score >= filter.score_floor)
        .collect();
    order.sort_by(|&a, &b| detections[b].score.total_cmp(&detections[a].score));
    let mut kept: Vec<usize> = Vec::with_capacity(order.len());
    for i in order {
        let d = &detections[i];
        let mut suppressed = false;
        for &k in &kept {
            let other = &detections[k];
            if other.category_id != d.category_id {
                continue;
            }
            let overlap = match filter.overlap {
                Overlap::Box => box_iou(&d.bbox, &other.bbox),
                Overlap::Mask => mask_iou(&d.mask, &other.mask)?,
            };
            if overlap > filter.nms_iou {
                suppressed = true;
                break;
            }
        }
        if !suppressed {
            kept.push(i);
        }
    }
    Ok(kept)
}

/// One candidate for a detection: an existing memory slot or a new instance.
type Choice = (Option<usize>, f64);

/// Resolves per-detection preference lists so that each memory slot goes to
/// at most one detection. Each list must be sorted best first and end with a
/// `None` (new instance) choice, which is never contested. A detection that
/// loses a slot to a higher-scoring rival moves on to its next choice. Ties
/// go to the detection that comes first.
fn resolve_claims(prefs: &[Vec<Choice>]) -> Vec<Option<usize>> {
    let mut cursor = vec![0usize; prefs.len()];
    let mut holder: BTreeMap<usize, usize> = BTreeMap::new();
    let mut result: Vec<Option<usize>> = vec![None; prefs.len()];
    let mut queue: VecDeque<usize> = (0..prefs.len()).collect();
    while let Some(d) = queue.pop_front() {
        loop {
            let (slot, v) = prefs[d][cursor[d]];
            let Some(slot) = slot else {
                result[d] = None;
                break;
            };
            match holder.get(&slot).copied() {
                None => {
                    holder.insert(slot, d);
                    result[d] = Some(slot);
                    break;
                }
                Some(rival) => {
                    let rival_v = prefs[rival][cursor[rival]].1;
                    if v > rival_v || (v == rival_v && d < rival) {
                        holder.insert(slot, d);
                        result[d] = Some(slot);
                        cursor[rival] += 1;
                        queue.push_back(rival);
                        break;
                    }
                    cursor[d] += 1;
                }
            }
        }
    }
    result
}

fn sort_choices(choices: &mut [Choice]) {
    // Best first; equal scores favour existing slots in label order.
    choices.sort_by(|a, b| {
        b.1.total_cmp(&a.1).then_with(|| match (a.0, b.0) {
            (Some(x), Some(y)) => x.cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        })
    });
}

/// Association state for one video.
#[derive(Clone, Debug)]
pub struct TrackerState {
    video_id: u64,
    config: TrackerConfig,
    affinity: Affinity,
    memory: Vec<MemoryEntry>,
    frames_seen: usize,
    num_frames: usize,
}

impl TrackerState {
    pub fn new(video_id: u64, config: TrackerConfig) -> Self {
        Self::with_affinity(video_id, config, Affinity::Appearance)
    }

    pub fn with_affinity(video_id: u64, config: TrackerConfig, affinity: Affinity) -> Self {
        Self {
            video_id,
            config,
            affinity,
            memory: Vec::new(),
            frames_seen: 0,
            num_frames: 0,
        }
    }

    pub fn memory(&self) -> &[MemoryEntry] {
        &self.memory
    }

    /// Number of identified instances.
    pub fn num_instances(&self) -> usize {
        self.memory.len()
    }

    fn choices_for(&self, det: &Detection) -> Result<Vec<Choice>> {
        let w = &self.config.weights;
        let mut choices: Vec<Choice> = match self.affinity {
            Affinity::Appearance => {
                let lp = assign_log_probabilities(&det.feature, self.memory.iter().map(|e| e.feature.as_slice()))?;
                let mut c: Vec<Choice> = self
                    .memory
                    .iter()
                    .enumerate()
                    .map(|(n, e)| (Some(n), log_combined_score(lp[n + 1], det, e, w)))
                    .collect();
                c.push((None, new_instance_score(lp[0], det, w)));
                c
            }
            Affinity::IouGated { min_iou } => {
                let mut c: Vec<Choice> = self
                    .memory
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| box_iou(&det.bbox, &e.last_box) >= min_iou)
                    .map(|(n, e)| (Some(n), log_combined_score(0.0, det, e, w)))
                    .collect();
                sort_choices(&mut c);
                c.push((None, f64::NEG_INFINITY));
                return Ok(c);
            }
        };
        sort_choices(&mut choices);
        Ok(choices)
    }

    /// Processes one frame. Returns the label given to each input detection,
    /// or `None` for detections removed by the prefilter.
    pub fn step(&mut self, frame: &FrameDetections) -> Result<Vec<Option<u32>>> {
        if frame.video_id != self.video_id {
            return Err(Error::Argument(format!(
                "frame belongs to video {}, tracker is on video {}",
                frame.video_id, self.video_id
            )));
        }
        let dets = &frame.detections;
        if self.affinity == Affinity::Appearance {
            let dim = self
                .memory
                .first()
                .map(|e| e.feature.len())
                .or(dets.first().map(|d| d.feature.len()));
            if let Some(dim) = dim {
                if let Some(d) = dets.iter().find(|d| d.feature.len() != dim) {
                    return Err(Error::Argument(format!(
                        "feature dimension {} differs from {dim} on frame {}",
                        d.feature.len(),
                        frame.frame_index
                    )));
                }
            }
        }
        let kept = nms(dets, &self.config.prefilter)?;

        let slots: Vec<Option<usize>> = if self.frames_seen == 0 || self.memory.is_empty() {
            vec![None; kept.len()]
        } else {
            let prefs = kept
                .iter()
                .map(|&i| self.choices_for(&dets[i]))
                .collect::<Result<Vec<_>>>()?;
            resolve_claims(&prefs)
        };

        let mut labels = vec![None; dets.len()];
        for (&i, slot) in kept.iter().zip(&slots) {
            let label = match *slot {
                Some(n) => {
                    self.memory[n].update(&dets[i], frame.frame_index);
                    self.memory[n].label
                }
                None => {
                    let label = self.memory.len() as u32 + 1;
                    self.memory.push(MemoryEntry::new(label, &dets[i], frame.frame_index));
                    label
                }
            };
            labels[i] = Some(label);
        }
        self.frames_seen += 1;
        self.num_frames = self.num_frames.max(frame.frame_index + 1);
        Ok(labels)
    }

    pub fn set_num_frames(&mut self, n: usize) {
        self.num_frames = self.num_frames.max(n);
    }

    /// Turns the memory into tracks: mean detection score as confidence,
    /// majority category (ties to the larger summed score).
    pub fn finalize(&self) -> Vec<InstanceTrack> {
        self.memory
            .iter()
            .map(|e| finalize_entry(e.label as u64, self.video_id, self.num_frames, e))
            .collect()
    }
}

pub(crate) fn majority_category(categories: &[u32], scores: &[f64]) -> u32 {
    let mut tally: BTreeMap<u32, (usize, f64)> = BTreeMap::new();
    for (&c, &s) in categories.iter().zip(scores) {
        let t = tally.entry(c).or_insert((0, 0.0));
        t.0 += 1;
        t.1 += s;
    }
    let mut best: Option<(u32, usize, f64)> = None;
    for (c, (n, s)) in tally {
        if best.is_none_or(|(_, bn, bs)| n > bn || (n == bn && s > bs)) {
            best = Some((c, n, s));
        }
    }
    best.map_or(0, |b| b.0)
}

pub(crate) fn finalize_entry(id: u64, video_id: u64, num_frames: usize, e: &MemoryEntry) -> InstanceTrack {
    let n = e.score_history.len().max(1) as f64;
    InstanceTrack {
        instance_id: id,
        video_id,
        category_id: majority_category(&e.category_history, &e.score_history),
        num_frames,
        masks: e.masks.clone(),
        boxes: e.boxes.clone(),
        features: BTreeMap::new(),
        confidence: Some(e.score_history.iter().sum::<f64>() / n),
    }
}

pub(crate) fn run_tracker(mut state: TrackerState, video: &VideoDetections) -> Result<Vec<InstanceTrack>> {
    for frame in &video.frames {
        state.step(frame)?;
    }
    state.set_num_frames(video.num_frames());
    Ok(state.finalize())
}

/// Tracks one video end to end: every frame in index order, then finalize.
pub fn track_video(video: &VideoDetections, config: &TrackerConfig) -> Result<Vec<InstanceTrack>> {
    config.weights.validate()?;
    run_tracker(TrackerState::new(video.video_id, *config), video)
}
