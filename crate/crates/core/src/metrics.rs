//! Spatio-temporal IoU and video-level AP/AR.
//!
//! Tracks are compared with IoU accumulated over every frame of the video,
//! absent frames counting as empty masks. Matching and AP follow the COCO
//! conventions: hypotheses are visited in descending confidence and greedily
//! take the best still-unmatched ground truth, precision is read at 101 recall
//! points, and categories without ground truth are left out of the means.
//!
//! AR@k keeps only the `k` most confident hypotheses of each video, pooled
//! over categories, before computing per-category recall.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::io::{GroundTruth, InstanceTrack};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    /// Per-video hypothesis caps for AR.
    pub ar_limits: Vec<usize>,
    pub max_dets_per_video_category: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            // 0.50, 0.55, ..., 0.95 as correctly rounded decimals.
            iou_thresholds: (0..10).map(|i| f64::from(50 + 5 * i) / 100.0).collect(),
            ar_limits: vec![1, 10],
            max_dets_per_video_category: 100,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iou_thresholds.is_empty() {
            return Err(Error::Config("no IoU thresholds".into()));
        }
        let mut prev = 0.0;
        for &t in &self.iou_thresholds {
            if !(t > prev && t <= 1.0) {
                return Err(Error::Config(format!(
                    "IoU thresholds must be strictly increasing in (0, 1], got {:?}",
                    self.iou_thresholds
                )));
            }
            prev = t;
        }
        if self.ar_limits.contains(&0) || self.max_dets_per_video_category == 0 {
            return Err(Error::Config("detection limits must be positive".into()));
        }
        Ok(())
    }

    fn threshold_index(&self, value: f64) -> Option<usize> {
        self.iou_thresholds.iter().position(|&t| (t - value).abs() < 1e-12)
    }
}

/// Summed intersection and union areas over all frames.
fn st_overlap(gt: &InstanceTrack, hyp: &InstanceTrack) -> Result<(u64, u64)> {
    let mut inter = 0u64;
    let mut union = 0u64;
    for (t, g) in &gt.masks {
        match hyp.masks.get(t) {
            Some(h) => {
                let i = g.intersection_area(h)?;
                inter += i;
                union += g.area() + h.area() - i;
            }
            None => union += g.area(),
        }
    }
    for (t, h) in &hyp.masks {
        if !gt.masks.contains_key(t) {
            union += h.area();
        }
    }
    Ok((inter, union))
}

/// Spatio-temporal IoU of two tracks from the same video; 0 when both are empty.
pub fn st_iou(gt: &InstanceTrack, hyp: &InstanceTrack) -> Result<f64> {
    if gt.video_id != hyp.video_id {
        return Err(Error::Argument(format!(
            "tracks belong to different videos ({} vs {})",
            gt.video_id, hyp.video_id
        )));
    }
    let (inter, union) = st_overlap(gt, hyp)?;
    Ok(if union == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Indices sorted by descending score; equal scores keep input order.
fn by_confidence<'a>(tracks: impl Iterator<Item = (usize, &'a InstanceTrack)>) -> Vec<usize> {
    let mut v: Vec<(usize, f64)> = tracks.map(|(i, t)| (i, t.score())).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1));
    v.into_iter().map(|(i, _)| i).collect()
}

/// Greedy matching over a hypothesis × ground-truth IoU table. `order` lists
/// hypothesis rows in visiting order; `None` entries mark pairs that may not
/// match (different videos). Returns the matched ground-truth column per row.
fn greedy_match(order: &[usize], ious: &[Vec<Option<f64>>], n_gt: usize, threshold: f64) -> Vec<Option<usize>> {
    let mut taken = vec![false; n_gt];
    let mut out = vec![None; ious.len()];
    for &h in order {
        let mut best: Option<(usize, f64)> = None;
        for (g, iou) in ious[h].iter().enumerate() {
            let Some(iou) = *iou else { continue };
            if taken[g] || iou < threshold {
                continue;
            }
            if best.is_none_or(|(_, b)| iou > b) {
                best = Some((g, iou));
            }
        }
        if let Some((g, _)) = best {
            taken[g] = true;
            out[h] = Some(g);
        }
    }
    out
}

/// Matches hypotheses of one category against ground truth of the same
/// category at one IoU threshold. Returns, per hypothesis, the index of the
/// matched ground-truth track.
pub fn match_category(
    gt_tracks: &[&InstanceTrack],
    hyp_tracks: &[&InstanceTrack],
    threshold: f64,
) -> Result<Vec<Option<usize>>> {
    let ious = hyp_tracks
        .iter()
        .map(|h| {
            gt_tracks
                .iter()
                .map(|g| {
                    if g.video_id == h.video_id {
                        st_iou(g, h).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let order = by_confidence(hyp_tracks.iter().copied().enumerate());
    Ok(greedy_match(&order, &ious, gt_tracks.len(), threshold))
}

/// Area under the precision/recall curve sampled at recall 0, 0.01, ..., 1,
/// with precision made monotone from the right. `hits` must already be in
/// descending-confidence order.
pub fn interpolated_ap(hits: &[bool], num_gt: usize) -> f64 {
    if num_gt == 0 {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(hits.len());
    let mut precision = Vec::with_capacity(hits.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    for &hit in hits {
        if hit {
            tp += 1;
        } else {
            fp += 1;
        }
        recall.push(tp as f64 / num_gt as f64);
        precision.push(tp as f64 / (tp + fp) as f64);
    }
    for i in (1..precision.len()).rev() {
        if precision[i] > precision[i - 1] {
            precision[i - 1] = precision[i];
        }
    }
    let mut sum = 0.0;
    for k in 0..=100 {
        let r = f64::from(k) / 100.0;
        let idx = recall.partition_point(|&x| x < r);
        if idx < precision.len() {
            sum += precision[idx];
        }
    }
    sum / 101.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecallAt {
    pub max_per_video: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryEval {
    pub category_id: u32,
    pub name: String,
    pub num_gt: usize,
    /// AP at each configured threshold; `None` when the category has no
    /// ground truth.
    pub ap_per_threshold: Option<Vec<f64>>,
    pub ap: Option<f64>,
    pub ar: Option<Vec<RecallAt>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub iou_thresholds: Vec<f64>,
    pub ap: f64,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    pub ar: Vec<RecallAt>,
    pub per_category: Vec<CategoryEval>,
}

impl EvalReport {
    pub fn ar_at(&self, limit: usize) -> Option<f64> {
        self.ar.iter().find(|r| r.max_per_video == limit).map(|r| r.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned table with AP, AP50, AP75 and one AR column per limit, in
    /// percent.
    pub fn to_table(&self) -> String {
        let mut headers = vec!["AP".to_string(), "AP50".into(), "AP75".into()];
        let mut cells = vec![Some(self.ap), self.ap50, self.ap75];
        for r in &self.ar {
            headers.push(format!("AR{}", r.max_per_video));
            cells.push(Some(r.value));
        }
        let mut out = String::new();
        for h in &headers {
            out.push_str(&format!("{h:>7}"));
        }
        out.push('\n');
        for c in &cells {
            match c {
                Some(v) => out.push_str(&format!("{:>7.1}", v * 100.0)),
                None => out.push_str(&format!("{:>7}", "-")),
            }
        }
        out.push('\n');
        out
    }
}

fn check_hypothesis(gt: &GroundTruth, i: usize, h: &InstanceTrack) -> Result<()> {
    let video = gt
        .video(h.video_id)
        .ok_or_else(|| Error::Evaluation(format!("hypothesis {i} references unknown video {}", h.video_id)))?;
    if !gt.categories.contains(h.category_id) {
        return Err(Error::Evaluation(format!(
            "hypothesis {i} references unknown category {}",
            h.category_id
        )));
    }
    if let Some((&t, _)) = h.masks.iter().next_back() {
        if t >= video.length {
            return Err(Error::Evaluation(format!(
                "hypothesis {i} has a mask on frame {t}, video {} has {} frames",
                video.id, video.length
            )));
        }
    }
    for (&t, m) in &h.masks {
        if m.height() != video.height || m.width() != video.width {
            return Err(Error::Evaluation(format!(
                "hypothesis {i} frame {t}: mask size {}x{} differs from video {} size {}x{}",
                m.height(),
                m.width(),
                video.id,
                video.height,
                video.width
            )));
        }
    }
    Ok(())
}

/// Per-video data for one category: ground-truth tracks, all hypotheses in
/// confidence order, and the IoU table between them.
struct VideoCell {
    gt: Vec<usize>,
    hyps: Vec<usize>,
    ious: Vec<Vec<Option<f64>>>,
}

struct CategoryData {
    num_gt: usize,
    cells: BTreeMap<u64, VideoCell>,
}

pub fn evaluate(gt: &GroundTruth, hypotheses: &[InstanceTrack], config: &EvalConfig) -> Result<EvalReport> {
    config.validate()?;
    for (i, h) in hypotheses.iter().enumerate() {
        check_hypothesis(gt, i, h)?;
    }
    let cat_ids: Vec<u32> = gt.categories.ids().collect();

    // Per-video ranking across all categories, for the AR caps.
    let mut video_rank: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, h) in hypotheses.iter().enumerate() {
        video_rank.entry(h.video_id).or_default().push(i);
    }
    let mut rank_of = vec![0usize; hypotheses.len()];
    for idx in video_rank.values_mut() {
        let order = by_confidence(idx.iter().map(|&i| (i, &hypotheses[i])));
        for (r, i) in order.into_iter().enumerate() {
            rank_of[i] = r;
        }
    }

    let categories: Vec<CategoryData> = cat_ids
        .par_iter()
        .map(|&c| -> Result<CategoryData> {
            let mut cells: BTreeMap<u64, VideoCell> = BTreeMap::new();
            let mut gts: Vec<usize> = (0..gt.tracks.len())
                .filter(|&i| gt.tracks[i].category_id == c)
                .collect();
            gts.sort_by_key(|&i| (gt.tracks[i].video_id, gt.tracks[i].instance_id));
            for &g in &gts {
                cells
                    .entry(gt.tracks[g].video_id)
                    .or_insert_with(|| VideoCell {
                        gt: vec![],
                        hyps: vec![],
                        ious: vec![],
                    })
                    .gt
                    .push(g);
            }
            let hyps = hypotheses.iter().enumerate().filter(|(_, h)| h.category_id == c);
            for h in by_confidence(hyps) {
                cells
                    .entry(hypotheses[h].video_id)
                    .or_insert_with(|| VideoCell {
                        gt: vec![],
                        hyps: vec![],
                        ious: vec![],
                    })
                    .hyps
                    .push(h);
            }
            for cell in cells.values_mut() {
                cell.ious = cell
                    .hyps
                    .iter()
                    .map(|&h| {
                        cell.gt
                            .iter()
                            .map(|&g| st_iou(&gt.tracks[g], &hypotheses[h]).map(Some))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
            }
            Ok(CategoryData {
                num_gt: gts.len(),
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n_thr = config.iou_thresholds.len();
    let jobs: Vec<(usize, usize)> = (0..cat_ids.len())
        .flat_map(|c| (0..n_thr).map(move |t| (c, t)))
        .collect();
    // (AP, recall per AR limit) for each (category, threshold).
    let cell_results: Vec<(f64, Vec<f64>)> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let data = &categories[c];
            let threshold = config.iou_thresholds[t];
            let mut scored: Vec<(f64, bool)> = Vec::new();
            let mut tp_at_limit = vec![0usize; config.ar_limits.len()];
            for cell in data.cells.values() {
                let kept = cell.hyps.len().min(config.max_dets_per_video_category);
                let order: Vec<usize> = (0..kept).collect();
                let m = greedy_match(&order, &cell.ious, cell.gt.len(), threshold);
                for (row, &h) in cell.hyps[..kept].iter().enumerate() {
                    scored.push((hypotheses[h].score(), m[row].is_some()));
                }
                for (li, &limit) in config.ar_limits.iter().enumerate() {
                    let order: Vec<usize> = (0..cell.hyps.len())
                        .filter(|&row| rank_of[cell.hyps[row]] < limit)
                        .collect();
                    let m = greedy_match(&order, &cell.ious, cell.gt.len(), threshold);
                    tp_at_limit[li] += m.iter().filter(|x| x.is_some()).count();
                }
            }
            scored.sort_by(|a, b| b.0.total_cmp(&a.0));
            let hits: Vec<bool> = scored.into_iter().map(|(_, hit)| hit).collect();
            let ap = interpolated_ap(&hits, data.num_gt);
            let recalls = tp_at_limit
                .into_iter()
                .map(|tp| {
                    if data.num_gt == 0 {
                        0.0
                    } else {
                        tp as f64 / data.num_gt as f64
                    }
                })
                .collect();
            (ap, recalls)
        })
        .collect();

    let mut per_category = Vec::with_capacity(cat_ids.len());
    for (ci, &c) in cat_ids.iter().enumerate() {
        let num_gt = categories[ci].num_gt;
        let rows = &cell_results[ci * n_thr..(ci + 1) * n_thr];
        let (ap_per_threshold, ap, ar) = if num_gt == 0 {
            (None, None, None)
        } else {
            let aps: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let ap = aps.iter().sum::<f64>() / n_thr as f64;
            let ar = config
                .ar_limits
                .iter()
                .enumerate()
                .map(|(li, &limit)| RecallAt {
                    max_per_video: limit,
                    value: rows.iter().map(|r| r.1[li]).sum::<f64>() / n_thr as f64,
                })
                .collect();
            (Some(aps), Some(ap), Some(ar))
        };
        per_category.push(CategoryEval {
            category_id: c,
            name: gt.categories.name(c).unwrap_or_default().to_string(),
            num_gt,
            ap_per_threshold,
            ap,
            ar,
        });
    }

    let scored: Vec<&CategoryEval> = per_category.iter().filter(|c| c.num_gt > 0).collect();
    if scored.is_empty() {
        return Err(Error::Evaluation("ground truth contains no instances".into()));
    }
    let mean = |f: &dyn Fn(&CategoryEval) -> f64| scored.iter().map(|c| f(c)).sum::<f64>() / scored.len() as f64;
    let ap = mean(&|c| c.ap.unwrap_or(0.0));
    let ap_at = |value: f64| {
        config
            .threshold_index(value)
            .map(|t| mean(&|c| c.ap_per_threshold.as_ref().map_or(0.0, |a| a[t])))
    };
    let ar = config
        .ar_limits
        .iter()
        .enumerate()
        .map(|(li, &limit)| RecallAt {
            max_per_video: limit,
            value: mean(&|c| c.ar.as_ref().map_or(0.0, |a| a[li].value)),
        })
        .collect();

    Ok(EvalReport {
        iou_thresholds: config.iou_thresholds.clone(),
        ap,
        ap50: ap_at(0.5),
        ap75: ap_at(0.75),
        ar,
        per_category,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{CategorySet, VideoMeta};
    use crate::mask::{rle_encode, DenseMask, RleMask};

    fn mask(h: u32, w: u32, on: &[(u32, u32)]) -> RleMask {
        rle_encode(&DenseMask::from_fn(h, w, |r, c| on.contains(&(r, c))).unwrap())
    }

    fn track(id: u64, video: u64, cat: u32, frames: &[(usize, RleMask)], conf: Option<f64>) -> InstanceTrack {
        InstanceTrack {
            instance_id: id,
            video_id: video,
            category_id: cat,
            num_frames: 3,
            masks: frames.iter().cloned().collect(),
            boxes: BTreeMap::new(),
            features: BTreeMap::new(),
            confidence: conf,
        }
    }

    #[test]
    fn st_iou_two_frame_fixture() {
        // Frames 1 and 2 in 1-based terms are indices 0 and 1 here.
        let g = mask(2, 2, &[(0, 0), (0, 1)]);
        let gt = track(1, 1, 1, &[(0, g.clone()), (1, g)], None);
        let hyp = track(2, 1, 1, &[(1, mask(2, 2, &[(0, 1), (1, 1)]))], Some(1.0));
        assert!((st_iou(&gt, &hyp).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(st_iou(&gt, &gt).unwrap(), 1.0);
    }

    #[test]
    fn st_iou_temporally_disjoint() {
        let m = mask(2, 2, &[(0, 0)]);
        let a = track(1, 1, 1, &[(0, m.clone())], None);
        let b = track(2, 1, 1, &[(1, m)], None);
        assert_eq!(st_iou(&a, &b).unwrap(), 0.0);
        let other = track(3, 2, 1, &[(0, mask(2, 2, &[(0, 0)]))], None);
        assert!(matches!(st_iou(&a, &other), Err(Error::Argument(_))));
    }

    /// Ten-pixel GT on a 1x10 strip versus a hypothesis covering a chosen
    /// number of those pixels plus extras, giving an exact IoU.
    fn strip(on: std::ops::Range<u32>) -> RleMask {
        let cols: Vec<(u32, u32)> = on.map(|c| (0, c)).collect();
        mask(1, 100, &cols)
    }

    #[test]
    fn greedy_threshold() {
        // IoU 60/100 = 0.6
        let g = track(1, 1, 1, &[(0, strip(0..100))], None);
        let h = track(2, 1, 1, &[(0, strip(0..60))], Some(0.9));
        assert_eq!(match_category(&[&g], &[&h], 0.5).unwrap(), vec![Some(0)]);
        assert_eq!(match_category(&[&g], &[&h], 0.65).unwrap(), vec![None]);
    }

    #[test]
    fn greedy_prefers_confidence() {
        let g = track(1, 1, 1, &[(0, strip(0..100))], None);
        let h1 = track(2, 1, 1, &[(0, strip(0..70))], Some(0.9));
        let h2 = track(3, 1, 1, &[(0, strip(0..90))], Some(0.8));
        let m = match_category(&[&g], &[&h2, &h1], 0.5).unwrap();
        assert_eq!(m, vec![None, Some(0)]);
    }

    fn single_video_gt(tracks: Vec<InstanceTrack>) -> GroundTruth {
        GroundTruth {
            categories: CategorySet::new([(1, "a".to_string()), (2, "b".to_string())]).unwrap(),
            videos: vec![VideoMeta {
                id: 1,
                width: 100,
                height: 1,
                length: 3,
            }],
            tracks,
        }
    }

    #[test]
    fn ap_for_single_partial_hypothesis() {
        // IoU 62/100 clears thresholds 0.50, 0.55 and 0.60 only.
        let gt = single_video_gt(vec![track(1, 1, 1, &[(0, strip(0..100))], None)]);
        let hyp = track(0, 1, 1, &[(0, strip(0..62))], Some(0.7));
        let r = evaluate(&gt, &[hyp], &EvalConfig::default()).unwrap();
        assert!((r.ap - 0.3).abs() < 1e-9, "{}", r.ap);
        assert!((r.ar_at(1).unwrap() - 0.3).abs() < 1e-9);
        assert_eq!(r.ap50, Some(1.0));
        assert_eq!(r.ap75, Some(0.0));
        // Category 2 has no ground truth and is left out.
        assert_eq!(r.per_category[1].num_gt, 0);
        assert_eq!(r.per_category[1].ap, None);
    }

    #[test]
    fn perfect_and_empty() {
        let gts = vec![
            track(1, 1, 1, &[(0, strip(0..10)), (1, strip(2..12))], None),
            track(2, 1, 2, &[(2, strip(50..70))], None),
        ];
        let gt = single_video_gt(gts.clone());
        let hyps: Vec<_> = gts
            .into_iter()
            .map(|mut t| {
                t.confidence = Some(1.0);
                t
            })
            .collect();
        let r = evaluate(&gt, &hyps, &EvalConfig::default()).unwrap();
        assert_eq!(r.ap, 1.0);
        assert_eq!(r.ar_at(10), Some(1.0));
        let r = evaluate(&gt, &[], &EvalConfig::default()).unwrap();
        assert_eq!(r.ap, 0.0);
        assert!(r.to_table().contains("AR10"));
    }

    #[test]
    fn rejects_unknown_references() {
        let gt = single_video_gt(vec![track(1, 1, 1, &[(0, strip(0..10))], None)]);
        let bad_video = track(0, 9, 1, &[(0, strip(0..10))], Some(0.5));
        assert!(matches!(
            evaluate(&gt, &[bad_video], &EvalConfig::default()),
            Err(Error::Evaluation(_))
        ));
        let bad_cat = track(0, 1, 7, &[(0, strip(0..10))], Some(0.5));
        assert!(matches!(
            evaluate(&gt, &[bad_cat], &EvalConfig::default()),
            Err(Error::Evaluation(_))
        ));
    }

    #[test]
    fn ar_cap_pools_categories() {
        // Two GT objects of different categories; the more confident
        // hypothesis is a false positive, so AR@1 only sees it.
        let gt = single_video_gt(vec![
            track(1, 1, 1, &[(0, strip(0..10))], None),
            track(2, 1, 2, &[(0, strip(20..30))], None),
        ]);
        let fp = track(0, 1, 1, &[(0, strip(80..90))], Some(0.9));
        let tp = track(0, 1, 2, &[(0, strip(20..30))], Some(0.8));
        let r = evaluate(&gt, &[fp, tp], &EvalConfig::default()).unwrap();
        assert_eq!(r.ar_at(1), Some(0.0));
        assert_eq!(r.ar_at(10), Some(0.5));
    }

    #[test]
    fn interpolation_envelope() {
        // TP, FP, TP with two GT: precision 1, 1/2, 2/3 at recall .5, .5, 1.
        let ap = interpolated_ap(&[true, false, true], 2);
        let expected = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
        assert!((ap - expected).abs() < 1e-12);
    }
}
