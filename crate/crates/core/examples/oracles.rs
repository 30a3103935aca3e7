//! Generate synthetic videos, then compare tracking against the two oracles:
//! the image oracle (perfect masks, learned association) and the identity
//! oracle (detected masks, perfect association).
//!
//!     cargo run --release --example oracles -- [box_jitter] [seeds]

use vistk::assoc::TrackerConfig;
use vistk::metrics::{evaluate, EvalConfig};
use vistk::pipeline::{track_all, Method};
use vistk::synth::{generate, identity_oracle, image_oracle, SynthConfig};

fn main() -> vistk::Result<()> {
    let mut args = std::env::args().skip(1);
    let jitter: f64 = args.next().map_or(2.0, |s| s.parse().expect("box_jitter"));
    let seeds: u64 = args.next().map_or(20, |s| s.parse().expect("seeds"));
    let tracker = TrackerConfig::default();
    let eval = EvalConfig::default();

    println!("{:>5} {:>9} {:>9} {:>9}", "seed", "tracked", "image", "identity");
    for seed in 0..seeds {
        let cfg = SynthConfig {
            num_videos: 1,
            box_jitter: jitter,
            seed,
            ..SynthConfig::default()
        };
        let (gt, dets) = generate(&cfg)?;
        let tracked = evaluate(&gt, &track_all(&dets, &Method::MaskTrack(tracker))?, &eval)?;
        let image = evaluate(&gt, &image_oracle(&gt, &tracker)?, &eval)?;
        let identity = evaluate(&gt, &identity_oracle(&gt, &dets)?, &eval)?;
        println!("{seed:>5} {:>9.4} {:>9.4} {:>9.4}", tracked.ap, image.ap, identity.ap);
    }
    Ok(())
}
