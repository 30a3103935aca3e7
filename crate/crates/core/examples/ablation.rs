//! Switch the score, box-overlap and category cues on and off and see how
//! much each contributes.
//!
//!     cargo run --release --example ablation

use vistk::ablation::{run_ablation, CueToggles};
use vistk::assoc::TrackerConfig;
use vistk::metrics::EvalConfig;
use vistk::synth::{generate, SynthConfig};

fn main() -> vistk::Result<()> {
    let cfg = SynthConfig {
        num_videos: 12,
        max_objects: 5,
        feature_noise: 0.3,
        category_noise: 0.05,
        false_positive_rate: 0.1,
        box_jitter: 1.0,
        seed: 3,
        ..SynthConfig::default()
    };
    let (gt, dets) = generate(&cfg)?;
    let table = run_ablation(
        &gt,
        &dets,
        &TrackerConfig::default(),
        &EvalConfig::default(),
        &CueToggles::table_rows(),
    )?;
    print!("{}", table.to_table());
    Ok(())
}
