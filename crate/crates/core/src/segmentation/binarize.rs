use crate::components::{label_components, Polarity};
use crate::params::ScsParams;
use crate::raster::{BinaryMask, SaliencyMap};

/// Outcome of the iterated mean-threshold binarization.
#[derive(Clone, Debug, PartialEq)]
pub struct BinarizationTrace {
    pub final_mask: BinaryMask,
    /// Mean saliency used at each iteration.
    pub thresholds: Vec<f64>,
    /// Pixels of frame-touching components, ignored by later means.
    pub excluded: BinaryMask,
    pub iterations: usize,
}

impl BinarizationTrace {
    /// Threshold of the last iteration, or 0 if none ran.
    pub fn final_threshold(&self) -> f64 {
        self.thresholds.last().copied().unwrap_or(0.0)
    }
}

/// Threshold the map at its mean, discard components touching the frame and
/// re-threshold at the mean of the remaining pixels, until no new frame
/// contact appears, the mean stops decreasing, or the iteration cap is hit.
pub fn binarize_iterative(sm: &SaliencyMap, params: &ScsParams) -> BinarizationTrace {
    let (w, h) = (sm.width(), sm.height());
    let values = sm.values();
    let mut excluded = BinaryMask::empty(w, h);
    let mut thresholds: Vec<f64> = Vec::new();
    let mut final_mask = BinaryMask::empty(w, h);

    for _ in 0..params.max_binarize_iters {
        let (sum, n) = values
            .iter()
            .zip(excluded.bits())
            .filter(|(_, &ex)| !ex)
            .fold((0.0, 0usize), |(s, n), (v, _)| (s + v, n + 1));
        if n == 0 {
            break;
        }
        let mu = sum / n as f64;
        if thresholds.last().is_some_and(|&prev| mu >= prev) {
            break;
        }
        thresholds.push(mu);

        let fg_bits: Vec<bool> = values
            .iter()
            .zip(excluded.bits())
            .map(|(&v, &ex)| !ex && v > mu)
            .collect();
        let mut fg = BinaryMask::new(w, h, fg_bits).expect("same grid");
        let regions = label_components(&fg, params.connectivity, Polarity::Foreground)
            .expect("non-empty grid");
        let mut new_contact = false;
        for region in regions.iter().filter(|r| r.touches_frame) {
            new_contact = true;
            region.paint(&mut excluded, true);
            region.paint(&mut fg, false);
        }
        final_mask = fg;
        if !new_contact {
            break;
        }
    }

    BinarizationTrace {
        final_mask,
        iterations: thresholds.len(),
        thresholds,
        excluded,
    }
}
