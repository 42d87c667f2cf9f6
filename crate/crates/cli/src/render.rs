//! Overlay renderings of segmentation results.

use scs_core::error::{Error, Result};
use scs_core::{BinaryMask, Grid, Rgb, RgbImage};

pub const TP_COLOR: Rgb = [255, 255, 255];
pub const FP_COLOR: Rgb = [255, 0, 0];
pub const FN_COLOR: Rgb = [0, 255, 0];
pub const BOUNDARY_COLOR: Rgb = [0, 255, 0];

fn check(image: &RgbImage, mask: &BinaryMask) -> Result<()> {
    if image.grid_width() != mask.grid_width() || image.grid_height() != mask.grid_height() {
        return Err(Error::DimensionMismatch {
            left_w: image.width(),
            left_h: image.height(),
            right_w: mask.width(),
            right_h: mask.height(),
        });
    }
    Ok(())
}

/// Color true positives white, false positives red and false negatives green.
pub fn render_overlay(image: &RgbImage, pred: &BinaryMask, gt: &BinaryMask) -> Result<RgbImage> {
    check(image, pred)?;
    check(image, gt)?;
    let mut out = image.clone();
    for r in 0..image.height() {
        for c in 0..image.width() {
            match (pred.get(r, c), gt.get(r, c)) {
                (true, true) => out.set(r, c, TP_COLOR),
                (true, false) => out.set(r, c, FP_COLOR),
                (false, true) => out.set(r, c, FN_COLOR),
                (false, false) => {}
            }
        }
    }
    Ok(out)
}

/// Foreground pixels with a 4-neighbor in the background or on the frame.
pub fn contour(mask: &BinaryMask) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    BinaryMask::from_fn(w, h, |r, c| {
        mask.get(r, c)
            && (r == 0
                || c == 0
                || r + 1 == h
                || c + 1 == w
                || !mask.get(r - 1, c)
                || !mask.get(r + 1, c)
                || !mask.get(r, c - 1)
                || !mask.get(r, c + 1))
    })
}

/// Draw the mask contour over the image, thickened to `thickness` pixels inward.
pub fn render_boundary(image: &RgbImage, mask: &BinaryMask, thickness: usize) -> Result<RgbImage> {
    check(image, mask)?;
    let mut band = BinaryMask::empty(mask.width(), mask.height());
    let mut inner = mask.clone();
    for _ in 0..thickness.max(1) {
        let ring = contour(&inner);
        for (r, c) in ring.foreground() {
            band.set(r, c, true);
            inner.set(r, c, false);
        }
    }
    let mut out = image.clone();
    for (r, c) in band.foreground() {
        out.set(r, c, BOUNDARY_COLOR);
    }
    Ok(out)
}

/// Line thickness that stays visible at any resolution.
pub fn boundary_thickness(width: usize, height: usize) -> usize {
    (width.min(height) / 250).max(1)
}
