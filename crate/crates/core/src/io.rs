//! Data model and JSON file formats.
//!
//! Three formats are read and written:
//!
//! - `gt.json`: `{"videos", "categories", "annotations"}` in the public video
//!   instance segmentation layout. Each annotation carries one segmentation
//!   (or `null`) per frame. Optional `bboxes` and `features` arrays follow
//!   the same per-frame layout; `features` is only needed by the image oracle.
//! - `detections.json`: `{"feature_dim", "videos": [{"video_id", "frames":
//!   [{"frame_index", "detections": [...]}]}]}`.
//! - `results.json`: `[{"video_id", "category_id", "score", "segmentations"}]`.
//!
//! Segmentations are `{"size": [h, w], "counts": [...]}`. The compressed
//! string form of `counts` is accepted on input; output always uses plain
//! integer lists. Frame indices are 0-based.
//!
//! Ground-truth boxes are taken from `bboxes` when given and otherwise derived
//! as the tight box around the mask.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::mask::{rle_from_compressed, BBox, RleMask};
use crate::{Error, Result};

/// Lowest detection score accepted on load; the association score takes its log.
pub const MIN_SCORE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategorySet {
    entries: BTreeMap<u32, String>,
}

impl CategorySet {
    pub fn new(entries: impl IntoIterator<Item = (u32, String)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, name) in entries {
            if id == 0 {
                return Err(Error::Argument("category ids must be positive".into()));
            }
            if map.insert(id, name).is_some() {
                return Err(Error::Argument(format!("duplicate category id {id}")));
            }
        }
        if map.is_empty() {
            return Err(Error::Argument("category set is empty".into()));
        }
        Ok(Self { entries: map })
    }

    pub fn contains(&self, id: u32) -> bool {
        self.entries.contains_key(&id)
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.entries.get(&id).map(String::as_str)
    }

    /// Category ids in ascending order.
    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.entries.iter().map(|(&id, n)| (id, n.as_str()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub id: u64,
    pub width: u32,
    pub height: u32,
    /// Number of frames.
    pub length: usize,
}

/// One ground-truth object or one hypothesis: a category plus a sparse
/// sequence of per-frame masks. Frames without an entry are treated as empty.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceTrack {
    pub instance_id: u64,
    pub video_id: u64,
    pub category_id: u32,
    /// Video length the track is laid out against.
    pub num_frames: usize,
    pub masks: BTreeMap<usize, RleMask>,
    pub boxes: BTreeMap<usize, BBox>,
    /// Per-frame appearance embeddings; only present on ground truth prepared
    /// for the image oracle.
    pub features: BTreeMap<usize, Vec<f64>>,
    pub confidence: Option<f64>,
}

impl InstanceTrack {
    /// Confidence used for ranking; unscored tracks rank as 1.0.
    pub fn score(&self) -> f64 {
        self.confidence.unwrap_or(1.0)
    }

    /// Frames on which the track has a non-empty mask.
    pub fn visible_frames(&self) -> impl Iterator<Item = usize> + '_ {
        self.masks.iter().filter(|(_, m)| !m.is_empty()).map(|(&t, _)| t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub categories: CategorySet,
    pub videos: Vec<VideoMeta>,
    pub tracks: Vec<InstanceTrack>,
}

impl GroundTruth {
    pub fn video(&self, id: u64) -> Option<&VideoMeta> {
        self.videos.iter().find(|v| v.id == id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub bbox: BBox,
    pub mask: RleMask,
    pub category_id: u32,
    pub score: f64,
    pub feature: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameDetections {
    pub video_id: u64,
    pub frame_index: usize,
    pub detections: Vec<Detection>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VideoDetections {
    pub video_id: u64,
    /// Sorted by frame index, no duplicates.
    pub frames: Vec<FrameDetections>,
}

impl VideoDetections {
    /// One past the largest listed frame index.
    pub fn num_frames(&self) -> usize {
        self.frames.last().map_or(0, |f| f.frame_index + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionSet {
    pub feature_dim: usize,
    pub videos: Vec<VideoDetections>,
}

// ---------------------------------------------------------------------------
// Wire structs

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CountsJson {
    Runs(Vec<u32>),
    Compressed(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RleJson {
    size: [u32; 2],
    counts: CountsJson,
}

impl RleJson {
    fn from_mask(m: &RleMask) -> Self {
        Self {
            size: [m.height(), m.width()],
            counts: CountsJson::Runs(m.counts().to_vec()),
        }
    }

    fn to_mask(&self) -> Result<RleMask> {
        let [h, w] = self.size;
        match &self.counts {
            CountsJson::Runs(c) => RleMask::new(h, w, c.clone()),
            CountsJson::Compressed(s) => rle_from_compressed(s, h, w),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CategoryJson {
    id: u32,
    name: String,
}

#[derive(Serialize, Deserialize)]
struct AnnotationJson {
    id: u64,
    video_id: u64,
    category_id: u32,
    segmentations: Vec<Option<RleJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bboxes: Option<Vec<Option<[f64; 4]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    features: Option<Vec<Option<Vec<f64>>>>,
}

#[derive(Serialize, Deserialize)]
struct GroundTruthJson {
    videos: Vec<VideoMeta>,
    categories: Vec<CategoryJson>,
    annotations: Vec<AnnotationJson>,
}

#[derive(Serialize, Deserialize)]
struct DetectionJson {
    bbox: [f64; 4],
    score: f64,
    category_id: u32,
    segmentation: RleJson,
    #[serde(default)]
    feature: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    frame_index: usize,
    detections: Vec<DetectionJson>,
}

#[derive(Serialize, Deserialize)]
struct VideoDetectionsJson {
    video_id: u64,
    frames: Vec<FrameJson>,
}

#[derive(Serialize, Deserialize)]
struct DetectionSetJson {
    feature_dim: usize,
    videos: Vec<VideoDetectionsJson>,
}

#[derive(Serialize, Deserialize)]
struct ResultJson {
    video_id: u64,
    category_id: u32,
    score: f64,
    segmentations: Vec<Option<RleJson>>,
}

// ---------------------------------------------------------------------------
// Reading

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut de = serde_json::Deserializer::from_reader(BufReader::new(file));
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = match e.path().to_string() {
            p if p == "." => "<root>".to_string(),
            p => p,
        };
        Error::load(path, field, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| Error::load(path, "<root>", e.to_string()))?;
    Ok(value)
}

fn check_score(path: &Path, field: &str, score: f64) -> Result<()> {
    if !(MIN_SCORE..=1.0).contains(&score) {
        return Err(Error::load(
            path,
            field,
            format!("score {score} outside [{MIN_SCORE}, 1]"),
        ));
    }
    Ok(())
}

fn mask_for_video(path: &Path, field: &str, rle: &RleJson, video: &VideoMeta) -> Result<RleMask> {
    let mask = rle.to_mask().map_err(|e| Error::load(path, field, e.to_string()))?;
    if mask.height() != video.height || mask.width() != video.width {
        return Err(Error::load(
            path,
            field,
            format!(
                "mask size {}x{} does not match video {} size {}x{}",
                mask.height(),
                mask.width(),
                video.id,
                video.height,
                video.width
            ),
        ));
    }
    Ok(mask)
}

fn parse_ground_truth(path: &Path, raw: GroundTruthJson) -> Result<GroundTruth> {
    let categories = CategorySet::new(raw.categories.into_iter().map(|c| (c.id, c.name)))
        .map_err(|e| Error::load(path, "categories", e.to_string()))?;

    let mut videos: Vec<VideoMeta> = Vec::with_capacity(raw.videos.len());
    let mut seen = HashSet::new();
    for (i, v) in raw.videos.iter().enumerate() {
        let field = format!("videos[{i}]");
        if v.length == 0 {
            return Err(Error::load(path, format!("{field}.length"), "must be at least 1"));
        }
        if v.width == 0 || v.height == 0 {
            return Err(Error::load(path, field, "width and height must be positive"));
        }
        if !seen.insert(v.id) {
            return Err(Error::load(
                path,
                format!("{field}.id"),
                format!("duplicate video id {}", v.id),
            ));
        }
        videos.push(*v);
    }

    let mut tracks = Vec::with_capacity(raw.annotations.len());
    let mut ann_ids = HashSet::new();
    for (i, ann) in raw.annotations.into_iter().enumerate() {
        let field = format!("annotations[{i}]");
        if !ann_ids.insert(ann.id) {
            return Err(Error::load(
                path,
                format!("{field}.id"),
                format!("duplicate annotation id {}", ann.id),
            ));
        }
        let video = videos.iter().find(|v| v.id == ann.video_id).ok_or_else(|| {
            Error::load(
                path,
                format!("{field}.video_id"),
                format!("references undeclared video {}", ann.video_id),
            )
        })?;
        if !categories.contains(ann.category_id) {
            return Err(Error::load(
                path,
                format!("{field}.category_id"),
                format!("references undeclared category {}", ann.category_id),
            ));
        }
        if ann.segmentations.len() != video.length {
            return Err(Error::load(
                path,
                format!("{field}.segmentations"),
                format!(
                    "has {} entries, video {} has {} frames",
                    ann.segmentations.len(),
                    video.id,
                    video.length
                ),
            ));
        }
        let mut masks = BTreeMap::new();
        for (t, seg) in ann.segmentations.iter().enumerate() {
            if let Some(seg) = seg {
                let f = format!("{field}.segmentations[{t}]");
                masks.insert(t, mask_for_video(path, &f, seg, video)?);
            }
        }
        if masks.values().all(RleMask::is_empty) {
            return Err(Error::load(
                path,
                format!("{field}.segmentations"),
                "annotation has no non-empty mask",
            ));
        }

        let mut boxes = BTreeMap::new();
        if let Some(bboxes) = &ann.bboxes {
            if bboxes.len() != video.length {
                return Err(Error::load(
                    path,
                    format!("{field}.bboxes"),
                    format!("has {} entries, expected {}", bboxes.len(), video.length),
                ));
            }
            for (t, b) in bboxes.iter().enumerate() {
                if let Some(b) = b {
                    if b[2] < 0.0 || b[3] < 0.0 || b.iter().any(|v| !v.is_finite()) {
                        return Err(Error::load(
                            path,
                            format!("{field}.bboxes[{t}]"),
                            "box must be finite with non-negative extent",
                        ));
                    }
                    boxes.insert(t, BBox::from(*b));
                }
            }
        }
        for (&t, m) in &masks {
            if let (std::collections::btree_map::Entry::Vacant(slot), Some(b)) = (boxes.entry(t), m.bounding_box()) {
                slot.insert(b);
            }
        }

        let mut features = BTreeMap::new();
        if let Some(feats) = ann.features {
            if feats.len() != video.length {
                return Err(Error::load(
                    path,
                    format!("{field}.features"),
                    format!("has {} entries, expected {}", feats.len(), video.length),
                ));
            }
            for (t, f) in feats.into_iter().enumerate() {
                if let Some(f) = f {
                    features.insert(t, f);
                }
            }
        }

        tracks.push(InstanceTrack {
            instance_id: ann.id,
            video_id: ann.video_id,
            category_id: ann.category_id,
            num_frames: video.length,
            masks,
            boxes,
            features,
            confidence: None,
        });
    }

    // All feature vectors in one file share a dimension.
    let mut dims = tracks
        .iter()
        .enumerate()
        .flat_map(|(i, tr)| tr.features.iter().map(move |(&t, f)| (i, t, f.len())));
    if let Some((_, _, dim)) = dims.next() {
        if let Some((i, t, d)) = dims.find(|&(_, _, d)| d != dim) {
            return Err(Error::load(
                path,
                format!("annotations[{i}].features[{t}]"),
                format!("length {d}, expected {dim}"),
            ));
        }
    }

    Ok(GroundTruth {
        categories,
        videos,
        tracks,
    })
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let raw: GroundTruthJson = read_json(path)?;
    parse_ground_truth(path, raw)
}

pub fn load_detections(path: impl AsRef<Path>) -> Result<DetectionSet> {
    let path = path.as_ref();
    let raw: DetectionSetJson = read_json(path)?;
    let dim = raw.feature_dim;
    let mut videos = Vec::with_capacity(raw.videos.len());
    let mut seen = HashSet::new();
    for (vi, v) in raw.videos.into_iter().enumerate() {
        let vfield = format!("videos[{vi}]");
        if !seen.insert(v.video_id) {
            return Err(Error::load(
                path,
                format!("{vfield}.video_id"),
                format!("duplicate video id {}", v.video_id),
            ));
        }
        let mut frames = Vec::with_capacity(v.frames.len());
        let mut frame_size: Option<(u32, u32)> = None;
        for (fi, f) in v.frames.into_iter().enumerate() {
            let ffield = format!("{vfield}.frames[{fi}]");
            let mut dets = Vec::with_capacity(f.detections.len());
            for (di, d) in f.detections.into_iter().enumerate() {
                let field = format!("{ffield}.detections[{di}]");
                check_score(path, &format!("{field}.score"), d.score)?;
                if d.feature.len() != dim {
                    return Err(Error::load(
                        path,
                        format!("{field}.feature"),
                        format!("length {}, feature_dim is {dim}", d.feature.len()),
                    ));
                }
                if d.category_id == 0 {
                    return Err(Error::load(path, format!("{field}.category_id"), "must be positive"));
                }
                let mask = d
                    .segmentation
                    .to_mask()
                    .map_err(|e| Error::load(path, format!("{field}.segmentation"), e.to_string()))?;
                let size = (mask.height(), mask.width());
                if *frame_size.get_or_insert(size) != size {
                    return Err(Error::load(
                        path,
                        format!("{field}.segmentation.size"),
                        "frame size differs from earlier detections of this video",
                    ));
                }
                dets.push(Detection {
                    bbox: BBox::from(d.bbox),
                    mask,
                    category_id: d.category_id,
                    score: d.score,
                    feature: d.feature,
                });
            }
            frames.push(FrameDetections {
                video_id: v.video_id,
                frame_index: f.frame_index,
                detections: dets,
            });
        }
        frames.sort_by_key(|f| f.frame_index);
        if let Some(w) = frames.windows(2).find(|w| w[0].frame_index == w[1].frame_index) {
            return Err(Error::load(
                path,
                format!("{vfield}.frames"),
                format!("frame_index {} listed twice", w[0].frame_index),
            ));
        }
        videos.push(VideoDetections {
            video_id: v.video_id,
            frames,
        });
    }
    Ok(DetectionSet {
        feature_dim: dim,
        videos,
    })
}

/// Reads a results file. Tracks get `instance_id` equal to their position in
/// the file and boxes derived from their masks.
pub fn load_results(path: impl AsRef<Path>) -> Result<Vec<InstanceTrack>> {
    let path = path.as_ref();
    let raw: Vec<ResultJson> = read_json(path)?;
    let mut tracks = Vec::with_capacity(raw.len());
    for (i, r) in raw.into_iter().enumerate() {
        let field = format!("[{i}]");
        check_score(path, &format!("{field}.score"), r.score)?;
        let mut masks = BTreeMap::new();
        let mut size: Option<(u32, u32)> = None;
        for (t, seg) in r.segmentations.iter().enumerate() {
            if let Some(seg) = seg {
                let f = format!("{field}.segmentations[{t}]");
                let m = seg.to_mask().map_err(|e| Error::load(path, &f, e.to_string()))?;
                let s = (m.height(), m.width());
                if *size.get_or_insert(s) != s {
                    return Err(Error::load(path, f, "mask size differs within one track"));
                }
                masks.insert(t, m);
            }
        }
        if masks.is_empty() {
            return Err(Error::load(
                path,
                format!("{field}.segmentations"),
                "result has no masks",
            ));
        }
        let boxes = masks
            .iter()
            .filter_map(|(&t, m)| m.bounding_box().map(|b| (t, b)))
            .collect();
        tracks.push(InstanceTrack {
            instance_id: i as u64,
            video_id: r.video_id,
            category_id: r.category_id,
            num_frames: r.segmentations.len(),
            masks,
            boxes,
            features: BTreeMap::new(),
            confidence: Some(r.score),
        });
    }
    Ok(tracks)
}

// ---------------------------------------------------------------------------
// Writing

/// Serializes `value` to a temporary file next to `path`, then renames it
/// into place.
pub(crate) fn write_json_atomic<T: Serialize + ?Sized>(path: &Path, value: &T, pretty: bool) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        let res = if pretty {
            serde_json::to_writer_pretty(&mut w, value)
        } else {
            serde_json::to_writer(&mut w, value)
        };
        res.map_err(|e| io_err(e.into()))?;
        w.write_all(b"\n").map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn segmentation_list(track: &InstanceTrack, len: usize) -> Vec<Option<RleJson>> {
    (0..len).map(|t| track.masks.get(&t).map(RleJson::from_mask)).collect()
}

fn results_json(hypotheses: &[InstanceTrack]) -> Vec<ResultJson> {
    hypotheses
        .iter()
        .map(|h| {
            let len = h.num_frames.max(h.masks.keys().next_back().map_or(0, |&t| t + 1));
            ResultJson {
                video_id: h.video_id,
                category_id: h.category_id,
                score: h.score(),
                segmentations: segmentation_list(h, len),
            }
        })
        .collect()
}

/// Serialized form of a results list, as written by [`save_results`].
pub fn results_to_string(hypotheses: &[InstanceTrack]) -> String {
    serde_json::to_string(&results_json(hypotheses)).expect("results serialize")
}

pub fn save_results(hypotheses: &[InstanceTrack], path: impl AsRef<Path>) -> Result<()> {
    write_json_atomic(path.as_ref(), &results_json(hypotheses), false)
}

pub fn save_ground_truth(gt: &GroundTruth, path: impl AsRef<Path>) -> Result<()> {
    let with_features = gt.tracks.iter().any(|t| !t.features.is_empty());
    let annotations = gt
        .tracks
        .iter()
        .map(|tr| {
            let len = gt.video(tr.video_id).map_or(tr.num_frames, |v| v.length);
            AnnotationJson {
                id: tr.instance_id,
                video_id: tr.video_id,
                category_id: tr.category_id,
                segmentations: segmentation_list(tr, len),
                bboxes: Some((0..len).map(|t| tr.boxes.get(&t).map(|&b| b.into())).collect()),
                features: with_features.then(|| (0..len).map(|t| tr.features.get(&t).cloned()).collect()),
            }
        })
        .collect();
    let raw = GroundTruthJson {
        videos: gt.videos.clone(),
        categories: gt
            .categories
            .iter()
            .map(|(id, name)| CategoryJson {
                id,
                name: name.to_string(),
            })
            .collect(),
        annotations,
    };
    write_json_atomic(path.as_ref(), &raw, false)
}

pub fn save_detections(set: &DetectionSet, path: impl AsRef<Path>) -> Result<()> {
    let raw = DetectionSetJson {
        feature_dim: set.feature_dim,
        videos: set
            .videos
            .iter()
            .map(|v| VideoDetectionsJson {
                video_id: v.video_id,
                frames: v
                    .frames
                    .iter()
                    .map(|f| FrameJson {
                        frame_index: f.frame_index,
                        detections: f
                            .detections
                            .iter()
                            .map(|d| DetectionJson {
                                bbox: d.bbox.into(),
                                score: d.score,
                                category_id: d.category_id,
                                segmentation: RleJson::from_mask(&d.mask),
                                feature: d.feature.clone(),
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    write_json_atomic(path.as_ref(), &raw, false)
}

/// Distinct video ids referenced by a set of tracks, ascending.
pub fn video_ids(tracks: &[InstanceTrack]) -> BTreeSet<u64> {
    tracks.iter().map(|t| t.video_id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    const GT: &str = r#"{
      "videos": [{"id": 1, "width": 2, "height": 2, "length": 2}],
      "categories": [{"id": 1, "name": "bear"}, {"id": 2, "name": "deer"}],
      "annotations": [
        {"id": 10, "video_id": 1, "category_id": 1,
         "segmentations": [{"size": [2, 2], "counts": [0, 1, 3]}, null]},
        {"id": 11, "video_id": 1, "category_id": 2,
         "segmentations": [null, {"size": [2, 2], "counts": "13"}],
         "bboxes": [null, [1, 0, 1, 1]]}
      ]
    }"#;

    #[test]
    fn loads_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let gt = load_ground_truth(write(&dir, "gt.json", GT)).unwrap();
        assert_eq!(gt.tracks.len(), 2);
        assert_eq!(gt.categories.len(), 2);
        let a = &gt.tracks[0];
        assert_eq!(a.masks.len(), 1);
        assert_eq!(a.boxes[&0], BBox::new(0.0, 0.0, 1.0, 1.0));
        let b = &gt.tracks[1];
        assert_eq!(b.masks[&1].counts(), &[1, 3]);
        assert_eq!(b.boxes[&1], BBox::new(1.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn all_null_annotation_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = GT.replace(r#"[null, {"size": [2, 2], "counts": "13"}]"#, "[null, null]");
        let err = load_ground_truth(write(&dir, "gt.json", &body)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("annotations[1].segmentations"), "{msg}");
    }

    #[test]
    fn undeclared_category_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = GT.replace(r#""category_id": 2"#, r#""category_id": 9"#);
        let msg = load_ground_truth(write(&dir, "gt.json", &body))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("annotations[1].category_id"), "{msg}");
        assert!(msg.contains("undeclared category 9"), "{msg}");
    }

    #[test]
    fn schema_error_names_field() {
        let dir = tempfile::tempdir().unwrap();
        let body = GT.replace(r#""length": 2"#, r#""length": "two""#);
        let msg = load_ground_truth(write(&dir, "gt.json", &body))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("videos[0].length"), "{msg}");
        assert!(msg.contains("gt.json"), "{msg}");
    }

    #[test]
    fn wrong_mask_size_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = GT.replace(
            r#"{"size": [2, 2], "counts": [0, 1, 3]}"#,
            r#"{"size": [1, 4], "counts": [0, 1, 3]}"#,
        );
        let msg = load_ground_truth(write(&dir, "gt.json", &body))
            .unwrap_err()
            .to_string();
        assert!(msg.contains("segmentations[0]"), "{msg}");
    }

    const DETS: &str = r#"{
      "feature_dim": 2,
      "videos": [{"video_id": 1, "frames": [
        {"frame_index": 1, "detections": []},
        {"frame_index": 0, "detections": [
          {"bbox": [0, 0, 1, 1], "score": 0.5, "category_id": 1,
           "segmentation": {"size": [2, 2], "counts": [0, 1, 3]}, "feature": [0.25, -1.5]}
        ]}
      ]}]
    }"#;

    #[test]
    fn loads_detections_and_sorts_frames() {
        let dir = tempfile::tempdir().unwrap();
        let set = load_detections(write(&dir, "d.json", DETS)).unwrap();
        let v = &set.videos[0];
        assert_eq!(v.frames[0].frame_index, 0);
        assert!(v.frames[1].detections.is_empty());
        assert_eq!(v.num_frames(), 2);
        assert_eq!(v.frames[0].detections[0].feature, vec![0.25, -1.5]);
    }

    #[test]
    fn mixed_feature_lengths_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = DETS.replace("[0.25, -1.5]", "[0.25]");
        let msg = load_detections(write(&dir, "d.json", &body)).unwrap_err().to_string();
        assert!(msg.contains("detections[0].feature"), "{msg}");
    }

    #[test]
    fn zero_score_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let body = DETS.replace(r#""score": 0.5"#, r#""score": 0"#);
        let msg = load_detections(write(&dir, "d.json", &body)).unwrap_err().to_string();
        assert!(msg.contains(".score"), "{msg}");
    }

    #[test]
    fn empty_results_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        save_results(&[], &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap().trim(), "[]");
        assert!(load_results(&p).unwrap().is_empty());
    }
}
