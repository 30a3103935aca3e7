//! Cue ablation: rerun association with the detection-score, box-IoU and
//! category terms switched on and off, and compare AP against the full score.
//! A cue is switched off by zeroing its weight.

use rayon::prelude::*;
use serde::Serialize;

use crate::assoc::{CueWeights, TrackerConfig};
use crate::io::{DetectionSet, GroundTruth};
use crate::metrics::{evaluate, EvalConfig};
use crate::pipeline::{track_all, Method};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CueToggles {
    pub det: bool,
    pub iou: bool,
    pub cat: bool,
}

impl CueToggles {
    pub const ALL_ON: Self = Self {
        det: true,
        iou: true,
        cat: true,
    };

    /// All eight combinations, ending with everything on.
    pub fn table_rows() -> Vec<Self> {
        [
            (false, false, false),
            (true, false, false),
            (false, true, false),
            (true, true, false),
            (false, false, true),
            (true, false, true),
            (false, true, true),
            (true, true, true),
        ]
        .into_iter()
        .map(|(det, iou, cat)| Self { det, iou, cat })
        .collect()
    }

    pub fn apply(&self, w: CueWeights) -> CueWeights {
        CueWeights {
            alpha: if self.det { w.alpha } else { 0.0 },
            beta: if self.iou { w.beta } else { 0.0 },
            gamma: if self.cat { w.gamma } else { 0.0 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub toggles: CueToggles,
    pub ap: f64,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    pub delta_ap: f64,
    pub delta_ap50: Option<f64>,
    pub delta_ap75: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Text layout: one row per combination, values in percent with the
    /// difference to the all-on row in parentheses.
    pub fn to_table(&self) -> String {
        let mark = |on: bool| if on { "✓" } else { "✗" };
        let cell = |v: Option<f64>, d: Option<f64>, full: bool| match (v, d) {
            (Some(v), _) if full => format!("{:.1}", v * 100.0),
            (Some(v), Some(d)) => format!("{:.1}({:+.1})", v * 100.0, d * 100.0),
            _ => "-".to_string(),
        };
        let mut out = format!(
            "{:<4}{:<4}{:<4}{:>14}{:>14}{:>14}\n",
            "Det", "IoU", "Cat", "AP", "AP50", "AP75"
        );
        for r in &self.rows {
            let full = r.toggles == CueToggles::ALL_ON;
            out.push_str(&format!(
                "{:<4}{:<4}{:<4}{:>14}{:>14}{:>14}\n",
                mark(r.toggles.det),
                mark(r.toggles.iou),
                mark(r.toggles.cat),
                cell(Some(r.ap), Some(r.delta_ap), full),
                cell(r.ap50, r.delta_ap50, full),
                cell(r.ap75, r.delta_ap75, full),
            ));
        }
        out
    }
}

/// Tracks and evaluates once per toggle combination. Deltas are taken
/// against the all-on combination, which is computed even if not requested.
pub fn run_ablation(
    gt: &GroundTruth,
    detections: &DetectionSet,
    base: &TrackerConfig,
    eval: &EvalConfig,
    rows: &[CueToggles],
) -> Result<AblationTable> {
    let mut combos: Vec<CueToggles> = rows.to_vec();
    if !combos.contains(&CueToggles::ALL_ON) {
        combos.push(CueToggles::ALL_ON);
    }
    let reports = combos
        .par_iter()
        .map(|t| {
            let cfg = TrackerConfig {
                weights: t.apply(base.weights),
                prefilter: base.prefilter,
            };
            let hyps = track_all(detections, &Method::MaskTrack(cfg))?;
            evaluate(gt, &hyps, eval)
        })
        .collect::<Result<Vec<_>>>()?;
    let full = &reports[combos.iter().position(|t| *t == CueToggles::ALL_ON).expect("present")];
    let diff = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(a, b)| a - b);
    let rows = rows
        .iter()
        .map(|t| {
            let r = &reports[combos.iter().position(|c| c == t).expect("present")];
            AblationRow {
                toggles: *t,
                ap: r.ap,
                ap50: r.ap50,
                ap75: r.ap75,
                delta_ap: r.ap - full.ap,
                delta_ap50: diff(r.ap50, full.ap50),
                delta_ap75: diff(r.ap75, full.ap75),
            }
        })
        .collect();
    Ok(AblationTable { rows })
}
