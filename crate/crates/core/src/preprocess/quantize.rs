//! Color quantization behind a common strategy interface.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::{luma, to_f64};
use crate::raster::{Rgb, RgbImage};
use crate::registry::Strategy;

/// Ordered, duplicate-free set of palette colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    colors: Vec<Rgb>,
}

impl Palette {
    /// Drops duplicates, keeping first occurrences. Returns `None` if empty.
    pub fn new(colors: impl IntoIterator<Item = Rgb>) -> Option<Self> {
        let mut seen = HashSet::new();
        let colors: Vec<Rgb> = colors.into_iter().filter(|c| seen.insert(*c)).collect();
        (!colors.is_empty()).then_some(Self { colors })
    }

    pub fn colors(&self) -> &[Rgb] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn contains(&self, c: Rgb) -> bool {
        self.colors.contains(&c)
    }

    /// Index of the nearest palette color in RGB; ties go to the lower index.
    pub fn nearest(&self, c: Rgb) -> usize {
        let mut best = 0;
        let mut best_d = u32::MAX;
        for (i, p) in self.colors.iter().enumerate() {
            let d: u32 = (0..3)
                .map(|k| {
                    let diff = p[k] as i32 - c[k] as i32;
                    (diff * diff) as u32
                })
                .sum();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Map every pixel to its nearest palette color.
    pub fn remap(&self, image: &RgbImage) -> RgbImage {
        let mut cache: HashMap<Rgb, Rgb> = HashMap::new();
        let data = image
            .pixels()
            .flat_map(|p| *cache.entry(p).or_insert_with(|| self.colors[self.nearest(p)]))
            .collect();
        RgbImage::new(image.width(), image.height(), data).expect("same grid")
    }
}

/// Learns a palette of at most `colnum` colors for an image.
pub trait ColorQuantizer: Strategy {
    fn learn_palette(&self, image: &RgbImage, colnum: usize, seed: u64) -> Vec<Rgb>;
}

/// Reduce `image` to at most `colnum` colors.
///
/// Images that already have `colnum` or fewer distinct colors pass through
/// untouched with the palette listing exactly those colors.
pub fn quantize_colors(
    image: &RgbImage,
    colnum: usize,
    quantizer: &dyn ColorQuantizer,
    seed: u64,
) -> (RgbImage, Palette) {
    let mut distinct = Vec::new();
    let mut seen = HashSet::new();
    for p in image.pixels() {
        if seen.insert(p) {
            distinct.push(p);
            if distinct.len() > colnum {
                break;
            }
        }
    }
    if distinct.len() <= colnum {
        let palette = Palette::new(distinct).expect("image is non-empty");
        return (image.clone(), palette);
    }
    let learned = quantizer.learn_palette(image, colnum, seed);
    let palette = Palette::new(learned.into_iter().take(colnum))
        .unwrap_or_else(|| Palette::new([image.pixel(0)]).unwrap());
    let remapped = palette.remap(image);
    (remapped, palette)
}

fn round_color(c: [f64; 3]) -> Rgb {
    c.map(|v| v.round().clamp(0.0, 255.0) as u8)
}

fn sq_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum()
}

/// One-dimensional self-organizing map over sampled pixels.
///
/// Neurons start on luma-ordered samples, are trained with a shrinking
/// neighbourhood and decaying learning rate, then settled by a few batch
/// nearest-neuron averaging passes.
#[derive(Clone, Debug)]
pub struct SomQuantizer {
    pub max_steps: usize,
    pub initial_rate: f64,
    pub final_rate: f64,
    pub settle_passes: usize,
}

impl Default for SomQuantizer {
    fn default() -> Self {
        Self {
            max_steps: 100_000,
            initial_rate: 0.3,
            final_rate: 0.005,
            settle_passes: 3,
        }
    }
}

impl Strategy for SomQuantizer {
    fn name(&self) -> &'static str {
        "som"
    }
}

impl ColorQuantizer for SomQuantizer {
    fn learn_palette(&self, image: &RgbImage, colnum: usize, seed: u64) -> Vec<Rgb> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let npix = image.len();
        let pick = |rng: &mut ChaCha8Rng| to_f64(image.pixel(rng.random_range(0..npix)));

        let mut init: Vec<Rgb> = (0..colnum).map(|_| image.pixel(rng.random_range(0..npix))).collect();
        init.sort_by(|a, b| luma(*a).total_cmp(&luma(*b)).then_with(|| a.cmp(b)));
        let mut neurons: Vec<[f64; 3]> = init.into_iter().map(to_f64).collect();

        let steps = npix.clamp(colnum * 300, self.max_steps.max(colnum * 300));
        let radius0 = (colnum as f64 / 8.0).max(1.0);
        let decay = (self.final_rate / self.initial_rate).ln();
        for t in 0..steps {
            let frac = t as f64 / steps as f64;
            let rate = self.initial_rate * (decay * frac).exp();
            let radius = radius0 * (1.0 - frac);
            let x = pick(&mut rng);
            let winner = (0..colnum)
                .min_by(|&i, &j| sq_dist(&neurons[i], &x).total_cmp(&sq_dist(&neurons[j], &x)))
                .unwrap();
            let reach = radius.floor() as usize;
            let lo = winner.saturating_sub(reach);
            let hi = (winner + reach).min(colnum - 1);
            let sigma2 = 2.0 * (radius * radius).max(0.25);
            for (i, n) in neurons.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let d = i.abs_diff(winner) as f64;
                let h = rate * (-(d * d) / sigma2).exp();
                for k in 0..3 {
                    n[k] += h * (x[k] - n[k]);
                }
            }
        }

        let samples: Vec<[f64; 3]> = (0..steps.min(npix.max(1)).min(50_000)).map(|_| pick(&mut rng)).collect();
        for _ in 0..self.settle_passes {
            let mut sums = vec![[0.0f64; 4]; colnum];
            for s in &samples {
                let i = (0..colnum)
                    .min_by(|&i, &j| sq_dist(&neurons[i], s).total_cmp(&sq_dist(&neurons[j], s)))
                    .unwrap();
                for k in 0..3 {
                    sums[i][k] += s[k];
                }
                sums[i][3] += 1.0;
            }
            for (n, s) in neurons.iter_mut().zip(&sums) {
                if s[3] > 0.0 {
                    *n = [s[0] / s[3], s[1] / s[3], s[2] / s[3]];
                }
            }
        }
        neurons.into_iter().map(round_color).collect()
    }
}

/// Median cut over the color histogram.
#[derive(Clone, Copy, Debug, Default)]
pub struct MedianCut;

impl Strategy for MedianCut {
    fn name(&self) -> &'static str {
        "median-cut"
    }
}

impl ColorQuantizer for MedianCut {
    fn learn_palette(&self, image: &RgbImage, colnum: usize, _seed: u64) -> Vec<Rgb> {
        let mut hist: HashMap<Rgb, u64> = HashMap::new();
        for p in image.pixels() {
            *hist.entry(p).or_default() += 1;
        }
        let mut entries: Vec<(Rgb, u64)> = hist.into_iter().collect();
        entries.sort_unstable();
        let mut boxes: Vec<Vec<(Rgb, u64)>> = vec![entries];

        let range = |b: &[(Rgb, u64)], k: usize| {
            let lo = b.iter().map(|e| e.0[k]).min().unwrap_or(0);
            let hi = b.iter().map(|e| e.0[k]).max().unwrap_or(0);
            hi - lo
        };
        while boxes.len() < colnum {
            let candidate = boxes
                .iter()
                .enumerate()
                .filter(|(_, b)| b.len() > 1)
                .map(|(i, b)| {
                    let (k, r) = (0..3).map(|k| (k, range(b, k))).max_by_key(|&(k, r)| (r, 2 - k)).unwrap();
                    (i, k, r)
                })
                .max_by_key(|&(i, _, r)| (r, usize::MAX - i));
            let Some((i, k, _)) = candidate else { break };
            let mut b = boxes.swap_remove(i);
            b.sort_by_key(|e| (e.0[k], e.0));
            let total: u64 = b.iter().map(|e| e.1).sum();
            let mut acc = 0;
            let mut cut = 1;
            for (j, e) in b.iter().enumerate() {
                acc += e.1;
                if acc * 2 >= total {
                    cut = (j + 1).clamp(1, b.len() - 1);
                    break;
                }
            }
            let upper = b.split_off(cut);
            boxes.push(b);
            boxes.push(upper);
        }
        let mut palette: Vec<Rgb> = boxes
            .iter()
            .map(|b| {
                let total: f64 = b.iter().map(|e| e.1 as f64).sum();
                let mut m = [0.0; 3];
                for (c, n) in b {
                    for k in 0..3 {
                        m[k] += c[k] as f64 * *n as f64;
                    }
                }
                round_color(m.map(|v| v / total))
            })
            .collect();
        palette.sort_unstable();
        palette
    }
}
