//! Online association frame by frame, then the three trackers side by side on
//! noisy synthetic detections.
//!
//!     cargo run --release --example track

use vistk::assoc::{TrackerConfig, TrackerState};
use vistk::baselines::{SeqConfig, DEFAULT_MIN_IOU};
use vistk::metrics::{evaluate, EvalConfig};
use vistk::pipeline::{track_all, Method};
use vistk::synth::{generate, SynthConfig};

fn main() -> vistk::Result<()> {
    let cfg = SynthConfig {
        num_videos: 8,
        box_jitter: 1.0,
        feature_noise: 0.3,
        miss_rate: 0.05,
        false_positive_rate: 0.1,
        category_noise: 0.05,
        entry_rate: 0.3,
        seed: 7,
        ..SynthConfig::default()
    };
    let (gt, dets) = generate(&cfg)?;

    // Step through the first video by hand.
    let video = &dets.videos[0];
    let mut state = TrackerState::new(video.video_id, TrackerConfig::default());
    for frame in &video.frames {
        let labels = state.step(frame)?;
        let shown: Vec<String> = labels
            .iter()
            .map(|l| l.map_or("-".to_string(), |l| l.to_string()))
            .collect();
        println!("frame {:>2}: {}", frame.frame_index, shown.join(" "));
    }
    println!("{} instances in video {}\n", state.num_instances(), video.video_id);

    let tracker = TrackerConfig::default();
    let methods = [
        ("masktrack", Method::MaskTrack(tracker)),
        (
            "iou",
            Method::IouTracker {
                config: tracker,
                min_iou: DEFAULT_MIN_IOU,
            },
        ),
        ("seq", Method::SeqTracker(SeqConfig::default())),
    ];
    for (name, method) in methods {
        let report = evaluate(&gt, &track_all(&dets, &method)?, &EvalConfig::default())?;
        println!("{name}");
        print!("{}", report.to_table());
    }
    Ok(())
}
