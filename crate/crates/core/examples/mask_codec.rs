//! Run-length masks: encode a drawn shape, compress it to a COCO-style
//! string, and compare overlap measures.

use vistk::mask::{box_iou, mask_iou, rle_decode, rle_encode, rle_from_compressed, rle_to_compressed, DenseMask};

fn disk(cy: f64, cx: f64, r: f64) -> DenseMask {
    DenseMask::from_fn(48, 64, |row, col| {
        let (dy, dx) = (f64::from(row) - cy, f64::from(col) - cx);
        dy * dy + dx * dx <= r * r
    })
    .expect("non-empty frame")
}

fn main() -> vistk::Result<()> {
    let a = rle_encode(&disk(24.0, 24.0, 12.0));
    let b = rle_encode(&disk(24.0, 36.0, 12.0));
    println!("disk A: area {} in {} runs", a.area(), a.counts().len());

    let packed = rle_to_compressed(&a);
    println!("compressed: {packed}");
    let back = rle_from_compressed(&packed, 48, 64)?;
    assert_eq!(back, a);
    assert_eq!(rle_encode(&rle_decode(&back)), a);

    let (ba, bb) = (
        a.bounding_box().expect("non-empty"),
        b.bounding_box().expect("non-empty"),
    );
    println!("mask IoU {:.4}", mask_iou(&a, &b)?);
    println!("box IoU  {:.4}  (A {ba:?})", box_iou(&ba, &bb));
    Ok(())
}
