//! Video instance segmentation toolkit.
//!
//! The crate covers everything downstream of a per-frame instance detector:
//!
//! - [`mask`]: column-major run-length encoded masks, boxes and IoU kernels.
//! - [`io`]: the ground-truth, detection and result JSON formats.
//! - [`metrics`]: spatio-temporal IoU and video AP/AR evaluation.
//! - [`assoc`]: the memory-based online association engine (appearance
//!   probabilities combined with detection score, box IoU and category cues).
//! - [`baselines`]: the appearance-free IoU tracker and the offline
//!   sequence tracker.
//! - [`synth`]: a seeded moving-shapes generator plus the image and identity
//!   oracle harnesses.
//! - [`ablation`]: cue on/off sweeps over the association score.
//! - [`pipeline`] and [`cli`]: file-level entry points and the `vistk` binary.

pub mod ablation;
pub mod assoc;
pub mod baselines;
pub mod cli;
mod error;
pub mod io;
pub mod mask;
pub mod metrics;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
