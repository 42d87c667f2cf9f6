//! Saliency models and saliency contrast enhancement.

use crate::color::{color_distance, linear_lut, linear_to_lab};
use crate::raster::{RgbImage, SaliencyMap};
use crate::registry::Strategy;

/// Produces a saliency map on `[0, 255]` with the same grid as the image.
pub trait SaliencyModel: Strategy {
    fn compute(&self, image: &RgbImage) -> SaliencyMap;
}

/// Frequency-tuned saliency: distance in CIELAB between the global mean color
/// and a slightly blurred copy of the image, rescaled so the maximum is 255.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrequencyTuned;

impl Strategy for FrequencyTuned {
    fn name(&self) -> &'static str {
        "frequency-tuned"
    }
}

const BINOMIAL_5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// CIELAB planes of an image, one `[L, a, b]` per pixel.
pub fn lab_planes(image: &RgbImage) -> Vec<[f64; 3]> {
    let lut = linear_lut();
    image
        .pixels()
        .map(|p| linear_to_lab(lut[p[0] as usize], lut[p[1] as usize], lut[p[2] as usize]))
        .collect()
}

/// Separable 5x5 binomial blur with edge replication.
pub fn binomial_blur(src: &[[f64; 3]], w: usize, h: usize) -> Vec<[f64; 3]> {
    let pass = |src: &[[f64; 3]], horizontal: bool| -> Vec<[f64; 3]> {
        let mut out = vec![[0.0; 3]; src.len()];
        for r in 0..h {
            for c in 0..w {
                let mut acc = [0.0; 3];
                for (k, wgt) in BINOMIAL_5.iter().enumerate() {
                    let off = k as isize - 2;
                    let (rr, cc) = if horizontal {
                        (r, (c as isize + off).clamp(0, w as isize - 1) as usize)
                    } else {
                        ((r as isize + off).clamp(0, h as isize - 1) as usize, c)
                    };
                    let v = src[rr * w + cc];
                    for ch in 0..3 {
                        acc[ch] += wgt * v[ch];
                    }
                }
                out[r * w + c] = acc;
            }
        }
        out
    };
    pass(&pass(src, true), false)
}

/// Linear rescale so the maximum becomes 255; near-zero fields become all zeros.
pub(crate) fn rescale_to_255(mut raw: Vec<f64>) -> Vec<f64> {
    let max = raw.iter().copied().fold(0.0, f64::max);
    if max <= 1e-9 {
        raw.iter_mut().for_each(|v| *v = 0.0);
    } else {
        raw.iter_mut().for_each(|v| *v = *v * 255.0 / max);
    }
    raw
}

impl SaliencyModel for FrequencyTuned {
    fn compute(&self, image: &RgbImage) -> SaliencyMap {
        let (w, h) = (image.width(), image.height());
        let lab = lab_planes(image);
        let n = lab.len() as f64;
        let mut mean = [0.0; 3];
        for p in &lab {
            for k in 0..3 {
                mean[k] += p[k];
            }
        }
        let mean = mean.map(|s| s / n);
        let blurred = binomial_blur(&lab, w, h);
        let raw = blurred.iter().map(|p| color_distance(*p, mean)).collect();
        SaliencyMap::new(w, h, rescale_to_255(raw)).expect("same grid")
    }
}

/// Nearest-rank percentile of an ascending slice, `p` in `(0, 100]`.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Saturate the bottom and top 1% of saliency values and stretch the rest to `[0, 255]`.
pub fn stretch_contrast(sm: &SaliencyMap) -> SaliencyMap {
    let mut sorted = sm.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = nearest_rank(&sorted, 1.0);
    let hi = nearest_rank(&sorted, 99.0);
    let values = if hi <= lo {
        vec![0.0; sorted.len()]
    } else {
        sm.values()
            .iter()
            .map(|v| ((v - lo) / (hi - lo)).clamp(0.0, 1.0) * 255.0)
            .collect()
    };
    SaliencyMap::new(sm.width(), sm.height(), values).expect("same grid")
}
