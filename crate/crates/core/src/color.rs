//! Color arithmetic: luma, sRGB to CIELAB, and pluggable color distances.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::raster::{check_grid, BinaryMask, Rgb, RgbImage};
use crate::registry::Strategy;

/// Rec. 601 luma.
pub fn luma(c: Rgb) -> f64 {
    0.299 * c[0] as f64 + 0.587 * c[1] as f64 + 0.114 * c[2] as f64
}

pub fn to_f64(c: Rgb) -> [f64; 3] {
    c.map(f64::from)
}

/// Euclidean distance between two colors in 8-bit RGB space.
pub fn color_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Darkest (minimum-luma) color present among the foreground pixels of `mask`.
/// Ties are broken by lexicographic `(R, G, B)` order.
pub fn darkest_color(image: &RgbImage, mask: &BinaryMask) -> Result<Rgb> {
    check_grid(image, mask)?;
    let colors: HashSet<Rgb> = mask
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| image.pixel(i))
        .collect();
    colors
        .into_iter()
        .min_by(|a, b| luma(*a).total_cmp(&luma(*b)).then_with(|| a.cmp(b)))
        .ok_or_else(|| Error::InvalidInput("darkest color of an empty foreground".into()))
}

fn srgb_to_linear(v: f64) -> f64 {
    let v = v / 255.0;
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// sRGB (D65) to CIELAB. Accepts real-valued channels on `[0, 255]`.
pub fn rgb_to_lab(c: [f64; 3]) -> [f64; 3] {
    linear_to_lab(srgb_to_linear(c[0]), srgb_to_linear(c[1]), srgb_to_linear(c[2]))
}

pub(crate) fn linear_to_lab(r: f64, g: f64, b: f64) -> [f64; 3] {
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    let fx = lab_f(x / 0.95047);
    let fy = lab_f(y);
    let fz = lab_f(z / 1.08883);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Lookup table for converting 8-bit sRGB channels to linear light.
pub(crate) fn linear_lut() -> [f64; 256] {
    let mut lut = [0.0; 256];
    for (i, v) in lut.iter_mut().enumerate() {
        *v = srgb_to_linear(i as f64);
    }
    lut
}

/// A distance between (possibly averaged) RGB colors.
pub trait ColorMetric: Strategy {
    fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64;
}

/// Plain Euclidean distance in RGB.
#[derive(Clone, Copy, Debug, Default)]
pub struct RgbEuclidean;

impl Strategy for RgbEuclidean {
    fn name(&self) -> &'static str {
        "rgb"
    }
}

impl ColorMetric for RgbEuclidean {
    fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        color_distance(a, b)
    }
}

/// CIE76 delta E: Euclidean distance after conversion to CIELAB.
#[derive(Clone, Copy, Debug, Default)]
pub struct CieLab76;

impl Strategy for CieLab76 {
    fn name(&self) -> &'static str {
        "lab"
    }
}

impl ColorMetric for CieLab76 {
    fn distance(&self, a: [f64; 3], b: [f64; 3]) -> f64 {
        color_distance(rgb_to_lab(a), rgb_to_lab(b))
    }
}
