//! Binary masks, column-major run-length encoding, and IoU kernels.
//!
//! Runs alternate background/foreground starting with background, scanned
//! column by column (pixel `(row, col)` sits at linear index `col * height + row`).
//! A mask whose first pixel is foreground starts with a zero-length
//! background run.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major dense binary mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMask {
    height: u32,
    width: u32,
    data: Vec<bool>,
}

impl DenseMask {
    pub fn new(height: u32, width: u32) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Dimension(format!(
                "mask dimensions must be positive, got {height}x{width}"
            )));
        }
        Ok(Self {
            height,
            width,
            data: vec![false; height as usize * width as usize],
        })
    }

    pub fn from_fn(height: u32, width: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let mut mask = Self::new(height, width)?;
        for row in 0..height {
            for col in 0..width {
                if f(row, col) {
                    mask.set(row, col, true);
                }
            }
        }
        Ok(mask)
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, row: u32, col: u32) -> bool {
        self.data[row as usize * self.width as usize + col as usize]
    }

    pub fn set(&mut self, row: u32, col: u32, value: bool) {
        self.data[row as usize * self.width as usize + col as usize] = value;
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> u64 {
        self.data.iter().filter(|&&v| v).count() as u64
    }
}

/// Run-length encoded binary mask tied to a frame size.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RleMask {
    height: u32,
    width: u32,
    counts: Vec<u32>,
}

impl RleMask {
    /// Builds a mask from raw run counts, checking that they tile the frame
    /// exactly and contain no zero-length runs past the first.
    pub fn new(height: u32, width: u32, counts: Vec<u32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Dimension(format!(
                "mask dimensions must be positive, got {height}x{width}"
            )));
        }
        if let Some(pos) = counts.iter().skip(1).position(|&c| c == 0) {
            return Err(Error::MalformedRle(format!("zero-length run at index {}", pos + 1)));
        }
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        let pixels = u64::from(height) * u64::from(width);
        if total != pixels {
            return Err(Error::MalformedRle(format!(
                "run counts sum to {total}, expected {height}x{width} = {pixels}"
            )));
        }
        Ok(Self { height, width, counts })
    }

    /// An all-background mask.
    pub fn empty(height: u32, width: u32) -> Result<Self> {
        Self::new(height, width, vec![height * width])
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Foreground pixel count: the sum of odd-indexed runs.
    pub fn area(&self) -> u64 {
        self.counts.iter().skip(1).step_by(2).map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.area() == 0
    }

    fn check_same_size(&self, other: &RleMask) -> Result<()> {
        if self.height != other.height || self.width != other.width {
            return Err(Error::Dimension(format!(
                "mask size mismatch: {}x{} vs {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        Ok(())
    }

    /// `|self ∩ other|`, computed by walking both run lists in step.
    pub fn intersection_area(&self, other: &RleMask) -> Result<u64> {
        self.check_same_size(other)?;
        let (a, b) = (&self.counts, &other.counts);
        let (mut i, mut j) = (0usize, 0usize);
        let (mut rem_a, mut rem_b) = (0u64, 0u64);
        let mut inter = 0u64;
        loop {
            while rem_a == 0 {
                if i == a.len() {
                    return Ok(inter);
                }
                rem_a = u64::from(a[i]);
                i += 1;
            }
            while rem_b == 0 {
                if j == b.len() {
                    return Ok(inter);
                }
                rem_b = u64::from(b[j]);
                j += 1;
            }
            let step = rem_a.min(rem_b);
            // The run just consumed has index i - 1; odd indices are foreground.
            if (i - 1) % 2 == 1 && (j - 1) % 2 == 1 {
                inter += step;
            }
            rem_a -= step;
            rem_b -= step;
        }
    }

    /// Tight axis-aligned box around the foreground, or `None` if empty.
    pub fn bounding_box(&self) -> Option<BBox> {
        let h = u64::from(self.height);
        let (mut x0, mut x1, mut y0, mut y1) = (u64::MAX, 0u64, u64::MAX, 0u64);
        let mut pos = 0u64;
        for (idx, &c) in self.counts.iter().enumerate() {
            let c = u64::from(c);
            if idx % 2 == 1 && c > 0 {
                let (start, end) = (pos, pos + c - 1);
                let (c_start, r_start) = (start / h, start % h);
                let (c_end, r_end) = (end / h, end % h);
                x0 = x0.min(c_start);
                x1 = x1.max(c_end);
                if c_start == c_end {
                    y0 = y0.min(r_start);
                    y1 = y1.max(r_end);
                } else {
                    y0 = 0;
                    y1 = h - 1;
                }
            }
            pos += c;
        }
        if x0 == u64::MAX {
            return None;
        }
        Some(BBox::new(
            x0 as f64,
            y0 as f64,
            (x1 - x0 + 1) as f64,
            (y1 - y0 + 1) as f64,
        ))
    }
}

/// Encode a dense mask into column-major runs.
pub fn rle_encode(mask: &DenseMask) -> RleMask {
    let (h, w) = (mask.height, mask.width);
    let mut counts = Vec::new();
    let mut current = false;
    let mut run = 0u32;
    for col in 0..w {
        for row in 0..h {
            let v = mask.get(row, col);
            if v != current {
                counts.push(run);
                run = 0;
                current = v;
            }
            run += 1;
        }
    }
    counts.push(run);
    RleMask {
        height: h,
        width: w,
        counts,
    }
}

pub fn rle_decode(rle: &RleMask) -> DenseMask {
    let h = rle.height;
    let mut mask = DenseMask {
        height: rle.height,
        width: rle.width,
        data: vec![false; rle.height as usize * rle.width as usize],
    };
    let mut pos = 0u64;
    for (idx, &c) in rle.counts.iter().enumerate() {
        if idx % 2 == 1 {
            for p in pos..pos + u64::from(c) {
                let col = (p / u64::from(h)) as u32;
                let row = (p % u64::from(h)) as u32;
                mask.set(row, col, true);
            }
        }
        pos += u64::from(c);
    }
    mask
}

/// `|a ∩ b| / |a ∪ b|`, defined as 0 when both masks are empty.
pub fn mask_iou(a: &RleMask, b: &RleMask) -> Result<f64> {
    let inter = a.intersection_area(b)?;
    let union = a.area() + b.area() - inter;
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Axis-aligned box: top-left corner plus extent, in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w.max(0.0) * self.h.max(0.0)
    }
}

impl From<[f64; 4]> for BBox {
    fn from([x, y, w, h]: [f64; 4]) -> Self {
        Self { x, y, w, h }
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

/// Rectangle IoU; zero-area boxes overlap nothing.
pub fn box_iou(a: &BBox, b: &BBox) -> f64 {
    let (area_a, area_b) = (a.area(), b.area());
    if area_a <= 0.0 || area_b <= 0.0 {
        return 0.0;
    }
    let iw = ((a.x + a.w).min(b.x + b.w) - a.x.max(b.x)).max(0.0);
    let ih = ((a.y + a.h).min(b.y + b.h) - a.y.max(b.y)).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    inter / (area_a + area_b - inter)
}

/// Decode the compact string form used by COCO-style annotation files:
/// 5-bit little-endian groups offset by 48, sign-extended, with runs past the
/// second stored as deltas against the run two positions back.
pub fn rle_from_compressed(s: &str, height: u32, width: u32) -> Result<RleMask> {
    let bytes = s.as_bytes();
    let mut counts: Vec<i64> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let mut x: i64 = 0;
        let mut shift = 0u32;
        loop {
            let Some(&byte) = bytes.get(i) else {
                return Err(Error::MalformedRle("truncated compressed run".into()));
            };
            if !(48..48 + 64).contains(&byte) {
                return Err(Error::MalformedRle(format!(
                    "invalid character {:?} in compressed counts",
                    byte as char
                )));
            }
            if shift > 55 {
                return Err(Error::MalformedRle("compressed run overflows".into()));
            }
            let c = i64::from(byte - 48);
            i += 1;
            x |= (c & 0x1f) << shift;
            shift += 5;
            if c & 0x20 == 0 {
                if c & 0x10 != 0 {
                    x |= -1i64 << shift;
                }
                break;
            }
        }
        if counts.len() > 2 {
            x += counts[counts.len() - 2];
        }
        counts.push(x);
    }
    let counts = counts
        .into_iter()
        .map(|c| u32::try_from(c).map_err(|_| Error::MalformedRle(format!("run length {c} out of range"))))
        .collect::<Result<Vec<_>>>()?;
    RleMask::new(height, width, counts)
}

/// Inverse of [`rle_from_compressed`].
pub fn rle_to_compressed(rle: &RleMask) -> String {
    let mut out = String::new();
    for (i, &c) in rle.counts.iter().enumerate() {
        let mut x = i64::from(c);
        if i > 2 {
            x -= i64::from(rle.counts[i - 2]);
        }
        loop {
            let mut group = x & 0x1f;
            x >>= 5;
            let more = if group & 0x10 != 0 { x != -1 } else { x != 0 };
            if more {
                group |= 0x20;
            }
            out.push((group as u8 + 48) as char);
            if !more {
                break;
            }
        }
    }
    out
}
