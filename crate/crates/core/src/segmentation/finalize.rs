use crate::components::{label_components, largest_region, Polarity};
use crate::hull::convex_hull_mask;
use crate::morphology::{fill_holes, morph_smooth, smoothing_radius};
use crate::params::ScsParams;
use crate::raster::BinaryMask;

/// Centered disk of radius `min_size / 4`, emitted when nothing was segmented.
pub fn fallback_disk(width: usize, height: usize) -> BinaryMask {
    let radius = width.min(height) as f64 / 4.0;
    let (cy, cx) = ((height as f64 - 1.0) / 2.0, (width as f64 - 1.0) / 2.0);
    BinaryMask::from_fn(width, height, |r, c| {
        let (dy, dx) = (r as f64 - cy, c as f64 - cx);
        dy * dy + dx * dx <= radius * radius
    })
}

/// Smooth, fill holes, keep the largest component and replace it by its hull.
/// Returns the mask and whether the empty-input fallback was used.
pub fn finalize_lesion(mask: &BinaryMask, params: &ScsParams) -> (BinaryMask, bool) {
    let (w, h) = (mask.width(), mask.height());
    if mask.is_blank() {
        return (fallback_disk(w, h), true);
    }
    let radius = smoothing_radius(w.min(h), params.smooth_radius_frac);
    let mut smoothed = morph_smooth(mask, radius);
    if smoothed.is_blank() {
        // everything was thinner than the disk; keep the raw shape
        smoothed = mask.clone();
    }
    let mut out = fill_holes(&smoothed);

    if params.single_lesion {
        let regions = label_components(&out, params.connectivity, Polarity::Foreground)
            .expect("non-empty grid");
        if let Some(i) = largest_region(&regions) {
            out = BinaryMask::from_pixels(w, h, &regions[i].pixels);
        }
    }
    if params.compute_hull {
        out = convex_hull_mask(&out.foreground(), w, h).expect("mask is non-empty");
    }
    (out, false)
}
