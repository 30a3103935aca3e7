//! File-based workflow: write a synthetic dataset, track it, save results and
//! score them, the same steps the `vistk` binary performs.
//!
//!     cargo run --release --example pipeline -- /tmp/vis-demo

use vistk::assoc::TrackerConfig;
use vistk::io::save_results;
use vistk::metrics::EvalConfig;
use vistk::pipeline::{evaluate_files, synth_to_dir, track_file, write_report, Method, DETECTIONS_FILE, GT_FILE};
use vistk::synth::SynthConfig;

fn main() -> vistk::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("vistk-demo"), Into::into);
    let cfg = SynthConfig {
        num_videos: 6,
        feature_noise: 0.2,
        box_jitter: 0.5,
        seed: 11,
        ..SynthConfig::default()
    };
    synth_to_dir(&cfg, &dir)?;

    let tracks = track_file(dir.join(DETECTIONS_FILE), &Method::MaskTrack(TrackerConfig::default()))?;
    let results = dir.join("results.json");
    save_results(&tracks, &results)?;

    let report = evaluate_files(dir.join(GT_FILE), &results, &EvalConfig::default())?;
    write_report(&report, dir.join("report.json"))?;
    println!("wrote {}", dir.display());
    print!("{}", report.to_table());
    Ok(())
}
