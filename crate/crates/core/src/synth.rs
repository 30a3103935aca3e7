//! Seeded moving-shapes data and the two oracle harnesses.
//!
//! Each video contains rectangles and ellipses that move with constant
//! velocity and bounce off the frame borders. Objects may enter after the
//! first frame or leave before the last. Detections are derived from the
//! ground truth by jittering the render box, drawing a score, flipping the
//! category, dropping objects, and adding false positives, all at configured
//! rates.
//!
//! Appearance features model a trained embedding: every object gets a
//! unit-norm prototype (prototypes within a video are mutually orthogonal
//! while the dimension allows), isotropic Gaussian noise is added, and the
//! result is rescaled to norm `feature_temperature`.
//!
//! Randomness comes from ChaCha8 seeded with `seed` through
//! `SeedableRng::seed_from_u64`; video `k` (0-based) draws from stream `k`,
//! so videos are generated independently and in parallel.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assoc::{finalize_entry, track_video, MemoryEntry, TrackerConfig};
use crate::io::{
    CategorySet, Detection, DetectionSet, FrameDetections, GroundTruth, InstanceTrack, VideoDetections, VideoMeta,
};
use crate::mask::{box_iou, mask_iou, rle_encode, BBox, DenseMask, RleMask};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub num_videos: usize,
    /// Frames per video.
    pub length: usize,
    pub width: u32,
    pub height: u32,
    pub min_objects: usize,
    pub max_objects: usize,
    pub num_categories: u32,
    /// Give every object in a video its own category.
    pub distinct_categories: bool,
    /// Object extent range in pixels (both sides).
    pub min_size: u32,
    pub max_size: u32,
    /// Maximum per-axis speed in pixels per frame.
    pub max_speed: f64,
    /// Fraction of ellipses; the rest are rectangles.
    pub ellipse_rate: f64,
    /// Probability that an object first appears after frame 0.
    pub entry_rate: f64,
    /// Probability that an object disappears before the last frame.
    pub exit_rate: f64,
    /// Upper bound on box IoU between same-category objects on any frame;
    /// trajectories are resampled until it holds.
    pub same_category_max_iou: f64,
    pub box_jitter: f64,
    pub score_min: f64,
    pub score_max: f64,
    pub feature_dim: usize,
    pub feature_temperature: f64,
    pub feature_noise: f64,
    /// Per-frame probability of one spurious detection.
    pub false_positive_rate: f64,
    pub miss_rate: f64,
    /// Probability that a detection reports a wrong category.
    pub category_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_videos: 4,
            length: 10,
            width: 96,
            height: 64,
            min_objects: 1,
            max_objects: 4,
            num_categories: 3,
            distinct_categories: false,
            min_size: 8,
            max_size: 20,
            max_speed: 1.5,
            ellipse_rate: 0.5,
            entry_rate: 0.0,
            exit_rate: 0.0,
            same_category_max_iou: 0.3,
            box_jitter: 0.0,
            score_min: 0.5,
            score_max: 1.0,
            feature_dim: 16,
            feature_temperature: 4.0,
            feature_noise: 0.0,
            false_positive_rate: 0.0,
            miss_rate: 0.0,
            category_noise: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.length == 0 {
            return bad("length must be at least 1".into());
        }
        if self.width == 0 || self.height == 0 {
            return bad("frame size must be positive".into());
        }
        if self.min_size < 2 || self.min_size > self.max_size {
            return bad(format!(
                "object size range [{}, {}] invalid (minimum 2)",
                self.min_size, self.max_size
            ));
        }
        if self.max_size > self.width || self.max_size > self.height {
            return bad(format!(
                "objects up to {} px do not fit a {}x{} frame",
                self.max_size, self.width, self.height
            ));
        }
        if self.min_objects > self.max_objects {
            return bad("min_objects exceeds max_objects".into());
        }
        if self.num_categories == 0 {
            return bad("num_categories must be positive".into());
        }
        if self.distinct_categories && (self.num_categories as usize) < self.max_objects {
            return bad("distinct_categories needs num_categories >= max_objects".into());
        }
        for (name, r) in [
            ("ellipse_rate", self.ellipse_rate),
            ("entry_rate", self.entry_rate),
            ("exit_rate", self.exit_rate),
            ("false_positive_rate", self.false_positive_rate),
            ("miss_rate", self.miss_rate),
            ("category_noise", self.category_noise),
            ("same_category_max_iou", self.same_category_max_iou),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must be in [0, 1], got {r}"));
            }
        }
        if !(self.score_min > 0.0 && self.score_min <= self.score_max && self.score_max <= 1.0) {
            return bad(format!(
                "score range [{}, {}] must lie in (0, 1]",
                self.score_min, self.score_max
            ));
        }
        for (name, v) in [
            ("max_speed", self.max_speed),
            ("box_jitter", self.box_jitter),
            ("feature_noise", self.feature_noise),
            ("feature_temperature", self.feature_temperature),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Shape {
    Rect,
    Ellipse,
}

/// Integer render box of a shape: column, row, width, height.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Placement {
    x: i64,
    y: i64,
    w: u32,
    h: u32,
}

impl Placement {
    fn bbox(&self) -> BBox {
        BBox::new(self.x as f64, self.y as f64, f64::from(self.w), f64::from(self.h))
    }
}

fn render(shape: Shape, p: Placement, height: u32, width: u32) -> RleMask {
    let (cx, cy) = (p.x as f64 + f64::from(p.w) / 2.0, p.y as f64 + f64::from(p.h) / 2.0);
    let (rx, ry) = (f64::from(p.w) / 2.0, f64::from(p.h) / 2.0);
    let dense = DenseMask::from_fn(height, width, |r, c| {
        let (r, c) = (i64::from(r), i64::from(c));
        if c < p.x || c >= p.x + i64::from(p.w) || r < p.y || r >= p.y + i64::from(p.h) {
            return false;
        }
        match shape {
            Shape::Rect => true,
            Shape::Ellipse => {
                let dx = (c as f64 + 0.5 - cx) / rx;
                let dy = (r as f64 + 0.5 - cy) / ry;
                dx * dx + dy * dy <= 1.0
            }
        }
    })
    .expect("frame size validated");
    rle_encode(&dense)
}

struct Object {
    shape: Shape,
    category_id: u32,
    /// Render box per frame; `None` while not visible.
    track: Vec<Option<Placement>>,
    prototype: Vec<f64>,
}

fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn prototypes(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let mut v = gaussian_vec(rng, dim);
        if k < dim {
            for p in &out {
                let d: f64 = v.iter().zip(p).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(p).for_each(|(a, b)| *a -= d * b);
            }
        }
        normalize(&mut v);
        out.push(v);
    }
    out
}

fn feature(rng: &mut ChaCha8Rng, prototype: &[f64], cfg: &SynthConfig) -> Vec<f64> {
    let mut f = prototype.to_vec();
    if cfg.feature_noise > 0.0 {
        for x in f.iter_mut() {
            let n: f64 = StandardNormal.sample(rng);
            *x += cfg.feature_noise * n;
        }
        normalize(&mut f);
    }
    f.iter_mut().for_each(|x| *x *= cfg.feature_temperature);
    f
}

fn simulate(rng: &mut ChaCha8Rng, cfg: &SynthConfig, category_id: u32) -> Object {
    let t_len = cfg.length;
    let w = rng.random_range(cfg.min_size..=cfg.max_size);
    let h = rng.random_range(cfg.min_size..=cfg.max_size);
    let shape = if rng.random_bool(cfg.ellipse_rate) {
        Shape::Ellipse
    } else {
        Shape::Rect
    };
    let (max_x, max_y) = (f64::from(cfg.width - w), f64::from(cfg.height - h));
    let mut x = rng.random::<f64>() * max_x;
    let mut y = rng.random::<f64>() * max_y;
    let mut vx = (rng.random::<f64>() * 2.0 - 1.0) * cfg.max_speed;
    let mut vy = (rng.random::<f64>() * 2.0 - 1.0) * cfg.max_speed;

    let start = if t_len > 1 && rng.random_bool(cfg.entry_rate) {
        rng.random_range(1..t_len)
    } else {
        0
    };
    let end = if t_len - start > 1 && rng.random_bool(cfg.exit_rate) {
        rng.random_range(start + 1..t_len)
    } else {
        t_len
    };

    let mut track = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let place = Placement {
            x: x.round() as i64,
            y: y.round() as i64,
            w,
            h,
        };
        track.push((start..end).contains(&t).then_some(place));
        x += vx;
        y += vy;
        if x < 0.0 {
            x = -x;
            vx = -vx;
        }
        if x > max_x {
            x = 2.0 * max_x - x;
            vx = -vx;
        }
        if y < 0.0 {
            y = -y;
            vy = -vy;
        }
        if y > max_y {
            y = 2.0 * max_y - y;
            vy = -vy;
        }
        x = x.clamp(0.0, max_x);
        y = y.clamp(0.0, max_y);
    }
    Object {
        shape,
        category_id,
        track,
        prototype: Vec::new(),
    }
}

fn separated(objects: &[Object], max_iou: f64) -> bool {
    for (i, a) in objects.iter().enumerate() {
        for b in &objects[i + 1..] {
            if a.category_id != b.category_id {
                continue;
            }
            for (pa, pb) in a.track.iter().zip(&b.track) {
                if let (Some(pa), Some(pb)) = (pa, pb) {
                    if box_iou(&pa.bbox(), &pb.bbox()) > max_iou {
                        return false;
                    }
                }
            }
        }
    }
    true
}

const MAX_PLACEMENT_ATTEMPTS: usize = 500;

fn jitter(rng: &mut ChaCha8Rng, p: Placement, cfg: &SynthConfig) -> Placement {
    let mut n = || -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z * cfg.box_jitter
    };
    let (dx, dy, dw, dh) = (n(), n(), n(), n());
    let w = (f64::from(p.w) + dw).round().clamp(2.0, f64::from(cfg.width)) as u32;
    let h = (f64::from(p.h) + dh).round().clamp(2.0, f64::from(cfg.height)) as u32;
    let x = (p.x as f64 + dx).round().clamp(0.0, f64::from(cfg.width - w)) as i64;
    let y = (p.y as f64 + dy).round().clamp(0.0, f64::from(cfg.height - h)) as i64;
    Placement { x, y, w, h }
}

struct VideoData {
    meta: VideoMeta,
    tracks: Vec<InstanceTrack>,
    detections: VideoDetections,
}

fn generate_video(cfg: &SynthConfig, index: usize) -> Result<VideoData> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let video_id = index as u64 + 1;
    let n_obj = rng.random_range(cfg.min_objects..=cfg.max_objects);

    let categories: Vec<u32> = if cfg.distinct_categories {
        let mut all: Vec<u32> = (1..=cfg.num_categories).collect();
        for i in 0..n_obj {
            let j = rng.random_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(n_obj);
        all
    } else {
        (0..n_obj).map(|_| rng.random_range(1..=cfg.num_categories)).collect()
    };

    let mut objects = Vec::new();
    let mut placed = false;
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        objects = categories.iter().map(|&c| simulate(&mut rng, cfg, c)).collect();
        if separated(&objects, cfg.same_category_max_iou) {
            placed = true;
            break;
        }
    }
    if !placed {
        return Err(Error::Config(format!(
            "could not place {n_obj} objects in video {video_id} within the same-category overlap limit"
        )));
    }
    let protos = prototypes(&mut rng, n_obj, cfg.feature_dim);
    for (o, p) in objects.iter_mut().zip(protos) {
        o.prototype = p;
    }

    let (h, w) = (cfg.height, cfg.width);
    let mut tracks = Vec::with_capacity(n_obj);
    for (k, o) in objects.iter().enumerate() {
        let mut masks = BTreeMap::new();
        let mut boxes = BTreeMap::new();
        let mut features = BTreeMap::new();
        for (t, p) in o.track.iter().enumerate() {
            if let Some(p) = p {
                let m = render(o.shape, *p, h, w);
                boxes.insert(t, m.bounding_box().expect("objects are never empty"));
                masks.insert(t, m);
                features.insert(t, feature(&mut rng, &o.prototype, cfg));
            }
        }
        tracks.push(InstanceTrack {
            instance_id: k as u64,
            video_id,
            category_id: o.category_id,
            num_frames: cfg.length,
            masks,
            boxes,
            features,
            confidence: None,
        });
    }

    let mut frames = Vec::with_capacity(cfg.length);
    for t in 0..cfg.length {
        let mut dets = Vec::new();
        for o in &objects {
            let Some(p) = o.track[t] else { continue };
            if rng.random_bool(cfg.miss_rate) {
                continue;
            }
            let place = jitter(&mut rng, p, cfg);
            let mask = render(o.shape, place, h, w);
            let score = rng.random_range(cfg.score_min..=cfg.score_max);
            let mut category_id = o.category_id;
            if cfg.num_categories > 1 && rng.random_bool(cfg.category_noise) {
                let other = rng.random_range(1..cfg.num_categories);
                category_id = if other >= o.category_id { other + 1 } else { other };
            }
            dets.push(Detection {
                bbox: mask.bounding_box().expect("objects are never empty"),
                mask,
                category_id,
                score,
                feature: feature(&mut rng, &o.prototype, cfg),
            });
        }
        if rng.random_bool(cfg.false_positive_rate) {
            let pw = rng.random_range(cfg.min_size..=cfg.max_size);
            let ph = rng.random_range(cfg.min_size..=cfg.max_size);
            let place = Placement {
                x: rng.random_range(0..=w - pw) as i64,
                y: rng.random_range(0..=h - ph) as i64,
                w: pw,
                h: ph,
            };
            let mask = render(Shape::Rect, place, h, w);
            let mut proto = gaussian_vec(&mut rng, cfg.feature_dim);
            normalize(&mut proto);
            dets.push(Detection {
                bbox: mask.bounding_box().expect("objects are never empty"),
                mask,
                category_id: rng.random_range(1..=cfg.num_categories),
                score: rng.random_range(cfg.score_min..=cfg.score_max),
                feature: feature(&mut rng, &proto, cfg),
            });
        }
        frames.push(FrameDetections {
            video_id,
            frame_index: t,
            detections: dets,
        });
    }

    Ok(VideoData {
        meta: VideoMeta {
            id: video_id,
            width: w,
            height: h,
            length: cfg.length,
        },
        tracks,
        detections: VideoDetections { video_id, frames },
    })
}

/// Generates ground truth (with per-frame features attached) and the
/// corrupted detections derived from it. Output depends only on `config`.
pub fn generate(config: &SynthConfig) -> Result<(GroundTruth, DetectionSet)> {
    config.validate()?;
    let videos = (0..config.num_videos)
        .into_par_iter()
        .map(|i| generate_video(config, i))
        .collect::<Result<Vec<_>>>()?;
    let categories = CategorySet::new((1..=config.num_categories).map(|c| (c, format!("shape{c}"))))?;
    let mut gt = GroundTruth {
        categories,
        videos: Vec::with_capacity(videos.len()),
        tracks: Vec::new(),
    };
    let mut dets = DetectionSet {
        feature_dim: config.feature_dim,
        videos: Vec::with_capacity(videos.len()),
    };
    for v in videos {
        gt.videos.push(v.meta);
        for mut t in v.tracks {
            t.instance_id = gt.tracks.len() as u64 + 1;
            gt.tracks.push(t);
        }
        dets.videos.push(v.detections);
    }
    Ok((gt, dets))
}

/// Ground-truth objects of each video as score-1.0 detections. With
/// `require_features`, every visible frame must carry a feature vector.
pub fn ground_truth_detections(gt: &GroundTruth, require_features: bool) -> Result<DetectionSet> {
    let mut dim: Option<usize> = None;
    let mut videos = Vec::with_capacity(gt.videos.len());
    for v in &gt.videos {
        let mut tracks: Vec<&InstanceTrack> = gt.tracks.iter().filter(|t| t.video_id == v.id).collect();
        tracks.sort_by_key(|t| t.instance_id);
        let mut frames = Vec::with_capacity(v.length);
        for t in 0..v.length {
            let mut dets = Vec::new();
            for tr in &tracks {
                let Some(mask) = tr.masks.get(&t).filter(|m| !m.is_empty()) else {
                    continue;
                };
                let feature = match tr.features.get(&t) {
                    Some(f) => f.clone(),
                    None if require_features => {
                        return Err(Error::Argument(format!(
                            "ground-truth instance {} has no feature on frame {t}",
                            tr.instance_id
                        )))
                    }
                    None => Vec::new(),
                };
                if *dim.get_or_insert(feature.len()) != feature.len() {
                    return Err(Error::Argument(format!(
                        "ground-truth instance {} frame {t}: feature dimension {} differs",
                        tr.instance_id,
                        feature.len()
                    )));
                }
                let bbox = tr
                    .boxes
                    .get(&t)
                    .copied()
                    .or_else(|| mask.bounding_box())
                    .expect("non-empty mask has a box");
                dets.push(Detection {
                    bbox,
                    mask: mask.clone(),
                    category_id: tr.category_id,
                    score: 1.0,
                    feature,
                });
            }
            frames.push(FrameDetections {
                video_id: v.id,
                frame_index: t,
                detections: dets,
            });
        }
        videos.push(VideoDetections { video_id: v.id, frames });
    }
    Ok(DetectionSet {
        feature_dim: dim.unwrap_or(0),
        videos,
    })
}

/// Runs the association engine on ground-truth image-level objects, so the
/// result measures association quality alone.
pub fn image_oracle(gt: &GroundTruth, config: &TrackerConfig) -> Result<Vec<InstanceTrack>> {
    let dets = ground_truth_detections(gt, true)?;
    let per_video = dets
        .videos
        .par_iter()
        .map(|v| track_video(v, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_video.into_iter().flatten().collect())
}

/// Links predicted detections through ground-truth identities: each detection
/// joins the ground-truth object it overlaps most (mask IoU > 0) on its frame.
/// When several detections pick the same object on one frame, the one with
/// the highest IoU is kept.
pub fn identity_oracle(gt: &GroundTruth, detections: &DetectionSet) -> Result<Vec<InstanceTrack>> {
    let mut out = Vec::new();
    for v in &detections.videos {
        let meta = gt
            .video(v.video_id)
            .ok_or_else(|| Error::Argument(format!("video {} is not in the ground truth", v.video_id)))?;
        let mut gts: Vec<&InstanceTrack> = gt.tracks.iter().filter(|t| t.video_id == v.video_id).collect();
        gts.sort_by_key(|t| t.instance_id);

        // (gt position, frame) -> (iou, detection)
        let mut picks: BTreeMap<(usize, usize), (f64, &Detection)> = BTreeMap::new();
        for frame in &v.frames {
            let t = frame.frame_index;
            for d in &frame.detections {
                let mut best: Option<(usize, f64)> = None;
                for (g, tr) in gts.iter().enumerate() {
                    let Some(m) = tr.masks.get(&t) else { continue };
                    let iou = mask_iou(m, &d.mask)?;
                    if iou > 0.0 && best.is_none_or(|(_, b)| iou > b) {
                        best = Some((g, iou));
                    }
                }
                let Some((g, iou)) = best else { continue };
                let slot = picks.entry((g, t)).or_insert((iou, d));
                if iou > slot.0 || (iou == slot.0 && d.score > slot.1.score) {
                    *slot = (iou, d);
                }
            }
        }

        let mut entries: BTreeMap<usize, MemoryEntry> = BTreeMap::new();
        for (&(g, t), &(_, d)) in &picks {
            match entries.get_mut(&g) {
                Some(e) => e.update(d, t),
                None => {
                    entries.insert(g, MemoryEntry::new(g as u32 + 1, d, t));
                }
            }
        }
        for (g, e) in entries {
            out.push(finalize_entry(gts[g].instance_id, v.video_id, meta.length, &e));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = SynthConfig {
            box_jitter: 1.5,
            feature_noise: 0.3,
            false_positive_rate: 0.3,
            miss_rate: 0.1,
            entry_rate: 0.3,
            exit_rate: 0.3,
            seed: 42,
            ..SynthConfig::default()
        };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = SynthConfig {
            seed: 43,
            ..cfg.clone()
        };
        assert_ne!(generate(&cfg).unwrap().0, generate(&other).unwrap().0);
    }

    #[test]
    fn zero_noise_detections_match_ground_truth() {
        let cfg = SynthConfig {
            min_objects: 2,
            max_objects: 2,
            ..SynthConfig::default()
        };
        let (gt, dets) = generate(&cfg).unwrap();
        for v in &dets.videos {
            for f in &v.frames {
                let visible: Vec<&InstanceTrack> = gt
                    .tracks
                    .iter()
                    .filter(|t| t.video_id == v.video_id && t.masks.contains_key(&f.frame_index))
                    .collect();
                assert_eq!(visible.len(), 2);
                assert_eq!(f.detections.len(), 2);
                for (d, t) in f.detections.iter().zip(&visible) {
                    assert_eq!(d.bbox, t.boxes[&f.frame_index]);
                    assert_eq!(d.mask, t.masks[&f.frame_index]);
                }
            }
        }
    }

    #[test]
    fn full_miss_rate() {
        let cfg = SynthConfig {
            miss_rate: 1.0,
            ..SynthConfig::default()
        };
        let (_, dets) = generate(&cfg).unwrap();
        assert!(dets
            .videos
            .iter()
            .all(|v| v.frames.iter().all(|f| f.detections.is_empty())));
    }

    #[test]
    fn oversize_objects_rejected() {
        let cfg = SynthConfig {
            max_size: 100,
            ..SynthConfig::default()
        };
        assert!(matches!(generate(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn prototypes_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = prototypes(&mut rng, 4, 8);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = p[i].iter().zip(&p[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_oracle_drops_unmatched() {
        let (gt, mut dets) = generate(&SynthConfig::default()).unwrap();
        let v = &mut dets.videos[0];
        let mut stray = v.frames[0].detections[0].clone();
        // An empty mask overlaps nothing.
        stray.mask = RleMask::empty(gt.videos[0].height, gt.videos[0].width).unwrap();
        v.frames[0].detections.push(stray);
        let hyps = identity_oracle(&gt, &dets).unwrap();
        let total_masks: usize = hyps.iter().map(|h| h.masks.len()).sum();
        let gt_masks: usize = gt.tracks.iter().map(|t| t.masks.len()).sum();
        assert_eq!(total_masks, gt_masks);
    }

    #[test]
    fn image_oracle_needs_features() {
        let (mut gt, _) = generate(&SynthConfig::default()).unwrap();
        gt.tracks[0].features.clear();
        assert!(matches!(
            image_oracle(&gt, &TrackerConfig::default()),
            Err(Error::Argument(_))
        ));
    }
}
