//! Spatio-temporal evaluation on a hand-built video: one object, three
//! candidate tracks of decreasing quality.
//!
//!     cargo run --example evaluate

use std::collections::BTreeMap;

use vistk::io::{CategorySet, GroundTruth, InstanceTrack, VideoMeta};
use vistk::mask::{rle_encode, DenseMask, RleMask};
use vistk::metrics::{evaluate, st_iou, EvalConfig};

const H: u32 = 20;
const W: u32 = 40;
const T: usize = 6;

// A 10x10 square whose left edge is at `x`.
fn square(x: u32) -> RleMask {
    rle_encode(&DenseMask::from_fn(H, W, |r, c| (5..15).contains(&r) && (x..x + 10).contains(&c)).unwrap())
}

fn track(id: u64, frames: impl IntoIterator<Item = (usize, u32)>, confidence: Option<f64>) -> InstanceTrack {
    let masks: BTreeMap<_, _> = frames.into_iter().map(|(t, x)| (t, square(x))).collect();
    InstanceTrack {
        instance_id: id,
        video_id: 1,
        category_id: 1,
        num_frames: T,
        boxes: masks.iter().map(|(&t, m)| (t, m.bounding_box().unwrap())).collect(),
        masks,
        features: BTreeMap::new(),
        confidence,
    }
}

fn main() -> vistk::Result<()> {
    let truth = track(1, (0..T).map(|t| (t, 2 + 4 * t as u32)), None);
    let gt = GroundTruth {
        categories: CategorySet::new([(1, "square".to_string())])?,
        videos: vec![VideoMeta {
            id: 1,
            width: W,
            height: H,
            length: T,
        }],
        tracks: vec![truth.clone()],
    };

    let candidates = [
        ("exact", track(10, (0..T).map(|t| (t, 2 + 4 * t as u32)), Some(0.9))),
        (
            "one pixel off",
            track(11, (0..T).map(|t| (t, 3 + 4 * t as u32)), Some(0.8)),
        ),
        (
            "first half only",
            track(12, (0..T / 2).map(|t| (t, 2 + 4 * t as u32)), Some(0.7)),
        ),
    ];
    for (name, hyp) in &candidates {
        let iou = st_iou(&truth, hyp)?;
        let report = evaluate(&gt, std::slice::from_ref(hyp), &EvalConfig::default())?;
        println!("{name:<16} st-IoU {iou:.3}  AP {:.3}", report.ap);
    }

    // All three together: the exact track ranks first and takes the match.
    let all: Vec<_> = candidates.into_iter().map(|(_, h)| h).collect();
    print!("{}", evaluate(&gt, &all, &EvalConfig::default())?.to_table());
    Ok(())
}
