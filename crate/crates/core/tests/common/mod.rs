//! Independent reference implementations and random fixtures shared by the
//! integration tests. Nothing here calls into the code under test except
//! for building inputs.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vistk::assoc::{CueWeights, MemoryEntry};
use vistk::baselines::{link_score, node_score, ChainNode};
use vistk::io::{CategorySet, Detection, FrameDetections, GroundTruth, InstanceTrack, VideoDetections, VideoMeta};
use vistk::mask::{rle_decode, rle_encode, BBox, DenseMask, RleMask};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random mask of random size up to `max_side`, with a random fill density.
pub fn random_dense(rng: &mut impl Rng, max_side: u32) -> DenseMask {
    let h = rng.random_range(1..=max_side);
    let w = rng.random_range(1..=max_side);
    random_dense_sized(rng, h, w)
}

pub fn random_dense_sized(rng: &mut impl Rng, h: u32, w: u32) -> DenseMask {
    let density: f64 = match rng.random_range(0..4) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random(),
    };
    DenseMask::from_fn(h, w, |_, _| rng.random_bool(density)).unwrap()
}

pub fn dense_counts(a: &DenseMask, b: &DenseMask) -> (u64, u64) {
    let (mut inter, mut union) = (0u64, 0u64);
    for r in 0..a.height() {
        for c in 0..a.width() {
            let (x, y) = (a.get(r, c), b.get(r, c));
            inter += u64::from(x && y);
            union += u64::from(x || y);
        }
    }
    (inter, union)
}

pub fn dense_iou(a: &DenseMask, b: &DenseMask) -> f64 {
    let (i, u) = dense_counts(a, b);
    if u == 0 {
        0.0
    } else {
        i as f64 / u as f64
    }
}

/// Spatio-temporal IoU by decoding every frame and counting pixels.
pub fn dense_st_iou(a: &InstanceTrack, b: &InstanceTrack, h: u32, w: u32, t: usize) -> f64 {
    let empty = DenseMask::new(h, w).unwrap();
    let (mut inter, mut union) = (0u64, 0u64);
    for f in 0..t {
        let da = a.masks.get(&f).map_or_else(|| empty.clone(), rle_decode);
        let db = b.masks.get(&f).map_or_else(|| empty.clone(), rle_decode);
        let (i, u) = dense_counts(&da, &db);
        inter += i;
        union += u;
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn rect(h: u32, w: u32, x0: u32, y0: u32, x1: u32, y1: u32) -> RleMask {
    rle_encode(&DenseMask::from_fn(h, w, |r, c| r >= y0 && r < y1 && c >= x0 && c < x1).unwrap())
}

pub fn random_rect(rng: &mut impl Rng, h: u32, w: u32) -> RleMask {
    let x0 = rng.random_range(0..w);
    let y0 = rng.random_range(0..h);
    let x1 = rng.random_range(x0 + 1..=w);
    let y1 = rng.random_range(y0 + 1..=h);
    rect(h, w, x0, y0, x1, y1)
}

pub fn track(
    instance_id: u64,
    video_id: u64,
    category_id: u32,
    num_frames: usize,
    masks: BTreeMap<usize, RleMask>,
    confidence: Option<f64>,
) -> InstanceTrack {
    InstanceTrack {
        instance_id,
        video_id,
        category_id,
        num_frames,
        boxes: masks
            .iter()
            .filter_map(|(&t, m)| m.bounding_box().map(|b| (t, b)))
            .collect(),
        masks,
        features: BTreeMap::new(),
        confidence,
    }
}

pub fn categories(n: u32) -> CategorySet {
    CategorySet::new((1..=n).map(|c| (c, format!("c{c}")))).unwrap()
}

/// Single-frame evaluation case: a few images with rectangle objects and
/// scored rectangle hypotheses (some perturbed from the objects). Scores
/// are distinct so the ranking is unambiguous.
pub fn random_image_case(rng: &mut impl Rng) -> (GroundTruth, Vec<InstanceTrack>) {
    let (h, w) = (12u32, 16u32);
    let n_cat = rng.random_range(1..=3);
    let n_img = rng.random_range(1..=3u64);
    let mut gts = Vec::new();
    let mut hyps = Vec::new();
    let mut next_id = 1;
    for v in 1..=n_img {
        for _ in 0..rng.random_range(0..=4) {
            let m = random_rect(rng, h, w);
            let c = rng.random_range(1..=n_cat);
            gts.push(track(next_id, v, c, 1, BTreeMap::from([(0, m)]), None));
            next_id += 1;
        }
    }
    if gts.is_empty() {
        gts.push(track(
            next_id,
            1,
            1,
            1,
            BTreeMap::from([(0, random_rect(rng, h, w))]),
            None,
        ));
    }
    for v in 1..=n_img {
        let here: Vec<&InstanceTrack> = gts.iter().filter(|g| g.video_id == v).collect();
        for _ in 0..rng.random_range(0..=6) {
            let (m, c) = if !here.is_empty() && rng.random_bool(0.6) {
                let g = here[rng.random_range(0..here.len())];
                let b = g.masks[&0].bounding_box().unwrap();
                let jit = |rng: &mut _, x: f64, lim: u32| {
                    let d: i64 = Rng::random_range(rng, -2..=2);
                    (x as i64 + d).clamp(0, i64::from(lim) - 1) as u32
                };
                let x0 = jit(rng, b.x, w);
                let y0 = jit(rng, b.y, h);
                let x1 = jit(rng, b.x + b.w, w + 1).max(x0 + 1).min(w);
                let y1 = jit(rng, b.y + b.h, h + 1).max(y0 + 1).min(h);
                let c = if rng.random_bool(0.85) {
                    g.category_id
                } else {
                    rng.random_range(1..=n_cat)
                };
                (rect(h, w, x0, y0, x1, y1), c)
            } else {
                (random_rect(rng, h, w), rng.random_range(1..=n_cat))
            };
            hyps.push(track(
                hyps.len() as u64,
                v,
                c,
                1,
                BTreeMap::from([(0, m)]),
                Some(rng.random_range(0.01..1.0)),
            ));
        }
    }
    let gt = GroundTruth {
        categories: categories(n_cat),
        videos: (1..=n_img)
            .map(|id| VideoMeta {
                id,
                width: w,
                height: h,
                length: 1,
            })
            .collect(),
        tracks: gts,
    };
    (gt, hyps)
}

/// Image instance-segmentation AP written from the textbook definition:
/// per image, each prediction (best score first) takes the unmatched object
/// of highest IoU at or above the threshold; predictions are pooled per
/// category; precision at recall level r is the best precision reached at
/// any recall >= r; 101 recall levels; mean over thresholds and over
/// categories that have objects.
pub fn image_ap(gt: &GroundTruth, preds: &[InstanceTrack]) -> f64 {
    let thresholds: Vec<f64> = (0..10).map(|i| f64::from(50 + 5 * i) / 100.0).collect();
    let mut per_cat = Vec::new();
    for cat in gt.categories.ids() {
        let objects: Vec<&InstanceTrack> = gt.tracks.iter().filter(|g| g.category_id == cat).collect();
        if objects.is_empty() {
            continue;
        }
        let mut per_thr = Vec::new();
        for &thr in &thresholds {
            let mut pooled: Vec<(f64, bool)> = Vec::new();
            for img in &gt.videos {
                let mut objs: Vec<&&InstanceTrack> = objects.iter().filter(|g| g.video_id == img.id).collect();
                objs.sort_by_key(|g| g.instance_id);
                let mut ps: Vec<&InstanceTrack> = preds
                    .iter()
                    .filter(|p| p.video_id == img.id && p.category_id == cat)
                    .collect();
                ps.sort_by(|a, b| b.score().partial_cmp(&a.score()).unwrap());
                let mut taken = vec![false; objs.len()];
                for p in ps {
                    let pm = rle_decode(&p.masks[&0]);
                    let mut best: Option<(usize, f64)> = None;
                    for (k, o) in objs.iter().enumerate() {
                        if taken[k] {
                            continue;
                        }
                        let iou = dense_iou(&rle_decode(&o.masks[&0]), &pm);
                        if iou >= thr && best.is_none_or(|(_, b)| iou > b) {
                            best = Some((k, iou));
                        }
                    }
                    if let Some((k, _)) = best {
                        taken[k] = true;
                    }
                    pooled.push((p.score(), best.is_some()));
                }
            }
            pooled.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            let n = objects.len() as f64;
            let mut curve = Vec::new();
            let mut tp = 0.0;
            for (k, &(_, hit)) in pooled.iter().enumerate() {
                if hit {
                    tp += 1.0;
                }
                curve.push((tp / n, tp / (k as f64 + 1.0)));
            }
            let mut total = 0.0;
            for i in 0..=100 {
                let r = f64::from(i) / 100.0;
                total += curve
                    .iter()
                    .filter(|(rec, _)| *rec >= r)
                    .map(|(_, prec)| *prec)
                    .fold(0.0, f64::max);
            }
            per_thr.push(total / 101.0);
        }
        per_cat.push(per_thr.iter().sum::<f64>() / per_thr.len() as f64);
    }
    per_cat.iter().sum::<f64>() / per_cat.len() as f64
}

/// Every chain of unused nodes on consecutive frames with its score,
/// accumulated as `node(next) + (score + link(prev, next))`.
pub fn all_chains(frames: &[Vec<ChainNode>], used: &[Vec<bool>], w: &CueWeights) -> Vec<(f64, Vec<(usize, usize)>)> {
    fn extend(
        frames: &[Vec<ChainNode>],
        used: &[Vec<bool>],
        w: &CueWeights,
        chain: &mut Vec<(usize, usize)>,
        score: f64,
        out: &mut Vec<(f64, Vec<(usize, usize)>)>,
    ) {
        out.push((score, chain.clone()));
        let &(t, i) = chain.last().unwrap();
        if t + 1 >= frames.len() {
            return;
        }
        for (j, next) in frames[t + 1].iter().enumerate() {
            if used[t + 1][j] {
                continue;
            }
            let s = node_score(next, w) + (score + link_score(&frames[t][i], next, w));
            chain.push((t + 1, j));
            extend(frames, used, w, chain, s, out);
            chain.pop();
        }
    }
    let mut out = Vec::new();
    for (t, nodes) in frames.iter().enumerate() {
        for (i, n) in nodes.iter().enumerate() {
            if !used[t][i] {
                extend(frames, used, w, &mut vec![(t, i)], node_score(n, w), &mut out);
            }
        }
    }
    out
}

pub fn random_chain_frames(rng: &mut impl Rng, max_frames: usize, max_per_frame: usize) -> Vec<Vec<ChainNode>> {
    let t = rng.random_range(1..=max_frames);
    (0..t)
        .map(|_| {
            (0..rng.random_range(0..=max_per_frame))
                .map(|_| ChainNode {
                    bbox: BBox::new(
                        f64::from(rng.random_range(0..20u32)),
                        f64::from(rng.random_range(0..20u32)),
                        f64::from(rng.random_range(1..10u32)),
                        f64::from(rng.random_range(1..10u32)),
                    ),
                    category_id: rng.random_range(1..=2),
                    score: rng.random_range(0.05..1.0),
                })
                .collect()
        })
        .collect()
}

pub fn detection(h: u32, w: u32, b: [u32; 4], category_id: u32, score: f64, feature: Vec<f64>) -> Detection {
    let mask = rect(h, w, b[0], b[1], b[0] + b[2], b[1] + b[3]);
    Detection {
        bbox: mask.bounding_box().unwrap(),
        mask,
        category_id,
        score,
        feature,
    }
}

pub fn random_feature(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// A random multi-frame video of rectangle detections with random features.
pub fn random_video(rng: &mut impl Rng, frames: usize, max_per_frame: usize, dim: usize) -> VideoDetections {
    let (h, w) = (24u32, 32u32);
    VideoDetections {
        video_id: 1,
        frames: (0..frames)
            .map(|t| FrameDetections {
                video_id: 1,
                frame_index: t,
                detections: (0..rng.random_range(0..=max_per_frame))
                    .map(|_| {
                        let x = rng.random_range(0..w - 4);
                        let y = rng.random_range(0..h - 4);
                        let bw = rng.random_range(2..=(w - x).min(12));
                        let bh = rng.random_range(2..=(h - y).min(12));
                        detection(
                            h,
                            w,
                            [x, y, bw, bh],
                            rng.random_range(1..=2),
                            rng.random_range(0.06..0.5),
                            random_feature(rng, dim),
                        )
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Memory entry built through the public tracker, for scoring tests.
pub fn entry_for(det: &Detection) -> MemoryEntry {
    let mut state = vistk::assoc::TrackerState::new(1, Default::default());
    state
        .step(&FrameDetections {
            video_id: 1,
            frame_index: 0,
            detections: vec![det.clone()],
        })
        .unwrap();
    state.memory()[0].clone()
}
