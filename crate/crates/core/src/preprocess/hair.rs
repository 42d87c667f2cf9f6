//! Thin dark structure (hair) detection by oriented grayscale closing, and
//! inpainting across the detected strokes.

use crate::color::luma;
use crate::components::{label_components, Connectivity, Polarity};
use crate::error::Result;
use crate::raster::{check_grid, BinaryMask, Rgb, RgbImage};

/// Unit steps for the 0, 45, 90 and 135 degree orientations, as `(drow, dcol)`.
const ORIENTATIONS: [(isize, isize); 4] = [(0, 1), (-1, 1), (1, 0), (1, 1)];

/// Index of the orientation at 90 degrees to `ORIENTATIONS[i]`.
const PERPENDICULAR: [usize; 4] = [2, 3, 0, 1];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HairParams {
    /// Structuring-element length in pixels.
    pub length: usize,
    /// Minimum gray-level excess of the closing over the input.
    pub threshold: f64,
    /// Components smaller than this are dropped from the mask.
    pub min_area: usize,
}

impl HairParams {
    pub fn for_min_size(min_size: usize, length_frac: f64, threshold: f64, min_area: usize) -> Self {
        Self {
            length: (length_frac * min_size as f64).round() as usize,
            threshold,
            min_area,
        }
    }
}

/// Pixels classified as hair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HairMask(pub BinaryMask);

impl HairMask {
    pub fn mask(&self) -> &BinaryMask {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.count()
    }
}

fn gray(image: &RgbImage) -> Vec<f64> {
    image.pixels().map(luma).collect()
}

/// 1-D max (dilate = true) or min filter along a direction; out-of-grid samples are skipped.
fn line_filter(src: &[f64], w: usize, h: usize, dir: (isize, isize), half: usize, dilate: bool) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    for r in 0..h {
        for c in 0..w {
            let mut acc = src[r * w + c];
            for k in 1..=half as isize {
                for s in [-k, k] {
                    let rr = r as isize + s * dir.0;
                    let cc = c as isize + s * dir.1;
                    if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                        continue;
                    }
                    let v = src[rr as usize * w + cc as usize];
                    acc = if dilate { acc.max(v) } else { acc.min(v) };
                }
            }
            out[r * w + c] = acc;
        }
    }
    out
}

/// Orientations whose closing must exceed the gray level for a pixel to count as hair.
///
/// A crossing stroke is filled by every orientation except its own, while the
/// corner of a thick blob is filled by the single diagonal that cuts it.
pub const MIN_FILLING_ORIENTATIONS: usize = 2;

/// Mark pixels where oriented closings exceed the gray level by more than the
/// threshold in at least [`MIN_FILLING_ORIENTATIONS`] orientations, then drop
/// small components.
pub fn detect_hair(image: &RgbImage, params: &HairParams) -> HairMask {
    let (w, h) = (image.width(), image.height());
    let half = params.length / 2;
    if half == 0 {
        return HairMask(BinaryMask::empty(w, h));
    }
    let g = gray(image);
    let mut votes = vec![0usize; g.len()];
    for &dir in &ORIENTATIONS {
        let dilated = line_filter(&g, w, h, dir, half, true);
        let closed = line_filter(&dilated, w, h, dir, half, false);
        for ((n, c), v) in votes.iter_mut().zip(closed).zip(&g) {
            if c - v > params.threshold {
                *n += 1;
            }
        }
    }
    let raw: Vec<bool> = votes.iter().map(|&n| n >= MIN_FILLING_ORIENTATIONS).collect();
    let mut mask = BinaryMask::new(w, h, raw).expect("same grid");
    if params.min_area > 0 {
        let regions = label_components(&mask, Connectivity::Eight, Polarity::Foreground)
            .expect("non-empty grid");
        for region in regions.iter().filter(|r| r.area < params.min_area) {
            region.paint(&mut mask, false);
        }
    }
    HairMask(mask)
}

fn in_grid(r: isize, c: isize, w: usize, h: usize) -> bool {
    r >= 0 && c >= 0 && r < h as isize && c < w as isize
}

/// Length of the hair run through `(r, c)` along a direction, capped at `cap`.
fn run_length(mask: &BinaryMask, r: usize, c: usize, dir: (isize, isize), cap: usize) -> usize {
    let (w, h) = (mask.width(), mask.height());
    let mut n = 1;
    for sign in [-1isize, 1] {
        for k in 1..=cap as isize {
            let rr = r as isize + sign * k * dir.0;
            let cc = c as isize + sign * k * dir.1;
            if !in_grid(rr, cc, w, h) || !mask.get(rr as usize, cc as usize) {
                break;
            }
            n += 1;
        }
    }
    n
}

/// Nearest non-hair pixel along `dir` from `(r, c)`: its color and step distance.
fn walk(mask: &BinaryMask, image: &RgbImage, r: usize, c: usize, dir: (isize, isize), cap: usize) -> Option<(Rgb, usize)> {
    let (w, h) = (mask.width(), mask.height());
    for k in 1..=cap as isize {
        let rr = r as isize + k * dir.0;
        let cc = c as isize + k * dir.1;
        if !in_grid(rr, cc, w, h) {
            return None;
        }
        if !mask.get(rr as usize, cc as usize) {
            return Some((image.get(rr as usize, cc as usize), k as usize));
        }
    }
    None
}

fn interpolate(a: Option<(Rgb, usize)>, b: Option<(Rgb, usize)>) -> Option<Rgb> {
    match (a, b) {
        (Some((ca, da)), Some((cb, db))) => {
            let (da, db) = (da as f64, db as f64);
            let mut out = [0u8; 3];
            for k in 0..3 {
                let v = (ca[k] as f64 * db + cb[k] as f64 * da) / (da + db);
                out[k] = v.round().clamp(0.0, 255.0) as u8;
            }
            Some(out)
        }
        (Some((c, _)), None) | (None, Some((c, _))) => Some(c),
        (None, None) => None,
    }
}

/// Replace hair pixels by linear interpolation between the nearest non-hair
/// pixels across the stroke. Non-hair pixels are left untouched.
pub fn remove_hair(image: &RgbImage, hair: &HairMask) -> Result<RgbImage> {
    let mask = hair.mask();
    check_grid(image, mask)?;
    let (w, h) = (image.width(), image.height());
    let cap = w.max(h);
    let mut out = image.clone();
    for r in 0..h {
        for c in 0..w {
            if !mask.get(r, c) {
                continue;
            }
            let runs: Vec<usize> = ORIENTATIONS
                .iter()
                .map(|&d| run_length(mask, r, c, d, cap))
                .collect();
            let along = (0..4).max_by_key(|&i| (runs[i], 3 - i)).unwrap();
            // across the stroke first, then the remaining directions by shortest run
            let mut order = vec![PERPENDICULAR[along]];
            let mut rest: Vec<usize> = (0..4).filter(|&i| i != order[0]).collect();
            rest.sort_by_key(|&i| (runs[i], i));
            order.extend(rest);
            for i in order {
                let (dr, dc) = ORIENTATIONS[i];
                let fwd = walk(mask, image, r, c, (dr, dc), cap);
                let back = walk(mask, image, r, c, (-dr, -dc), cap);
                if let Some(color) = interpolate(fwd, back) {
                    out.set(r, c, color);
                    break;
                }
            }
        }
    }
    Ok(out)
}
