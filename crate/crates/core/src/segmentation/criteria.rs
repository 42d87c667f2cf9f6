//! The color and geometry criteria that prune and grow the binary mask.

use std::collections::VecDeque;

use crate::color::{darkest_color, to_f64, ColorMetric};
use crate::components::{label_components, mean_color_of, Connectivity, PixelRegion, Polarity};
use crate::hull::{hull_pixel_count, pixel_hull, Point};
use crate::params::{KernelProximity, ScsParams};
use crate::raster::{BinaryMask, Rgb, RgbImage, SaliencyMap};
use crate::segmentation::transition::TransitionRule;

/// Region-to-darkest-color distances driving the color-proximity criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorProximityStats {
    pub c_star: Rgb,
    /// Distance of each region's mean color from `c_star`, in labelling order.
    pub distances: Vec<f64>,
    pub d_min: f64,
    pub d_max: f64,
    /// `d_max - d_min`.
    pub delta: f64,
    /// Midpoint of `d_min` and `d_max`.
    pub small_delta: f64,
}

/// Drop regions whose mean color is far from the darkest foreground color,
/// but only when the regions' distances are spread by more than `tc`.
pub fn color_proximity_filter(
    mask: &BinaryMask,
    image: &RgbImage,
    params: &ScsParams,
    metric: &dyn ColorMetric,
) -> (BinaryMask, Option<ColorProximityStats>) {
    if mask.is_blank() {
        return (mask.clone(), None);
    }
    let c_star = darkest_color(image, mask).expect("mask has foreground");
    let regions = label_components(mask, params.connectivity, Polarity::Foreground)
        .expect("non-empty grid");
    let distances: Vec<f64> = regions
        .iter()
        .map(|r| metric.distance(r.mean_color(image), to_f64(c_star)))
        .collect();
    let d_min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let d_max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stats = ColorProximityStats {
        c_star,
        d_min,
        d_max,
        delta: d_max - d_min,
        small_delta: (d_max + d_min) / 2.0,
        distances,
    };
    let mut out = mask.clone();
    if stats.delta > params.tc {
        for (region, &d) in regions.iter().zip(&stats.distances) {
            if d > stats.small_delta {
                region.paint(&mut out, false);
            }
        }
    }
    (out, Some(stats))
}

/// Foreground regions split into kernel and peripheral components.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelPartition {
    pub kernel: Vec<PixelRegion>,
    pub peripheral: Vec<PixelRegion>,
    pub kernel_area: usize,
    pub kernel_hull_area: usize,
    pub width: usize,
    pub height: usize,
}

impl KernelPartition {
    /// Hull vertices of all kernel pixels.
    pub fn kernel_hull(&self) -> Vec<Point> {
        let pixels: Vec<_> = self.kernel.iter().flat_map(|r| r.pixels.iter().copied()).collect();
        pixel_hull(&pixels)
    }
}

/// A region is peripheral when fewer than `tn` of its pixels exceed `2 * mu_s`.
/// If nothing qualifies as kernel, the largest region is promoted.
pub fn partition_kernel_peripheral(
    mask: &BinaryMask,
    sm: &SaliencyMap,
    mu_s: f64,
    params: &ScsParams,
) -> KernelPartition {
    let regions = label_components(mask, params.connectivity, Polarity::Foreground)
        .expect("non-empty grid");
    let strong = 2.0 * mu_s;
    let (mut kernel, mut peripheral): (Vec<_>, Vec<_>) = regions.into_iter().partition(|r| {
        r.pixels.iter().filter(|&&(row, col)| sm.get(row, col) > strong).count() >= params.tn
    });
    if kernel.is_empty() {
        if let Some(i) = crate::components::largest_region(&peripheral) {
            kernel.push(peripheral.remove(i));
        }
    }
    let mut part = KernelPartition {
        kernel_area: kernel.iter().map(|r| r.area).sum(),
        kernel_hull_area: 0,
        kernel,
        peripheral,
        width: mask.width(),
        height: mask.height(),
    };
    let hull = part.kernel_hull();
    part.kernel_hull_area = hull_pixel_count(&hull, part.width, part.height);
    part
}

/// Hull-bridging area of a peripheral region against the kernel hull.
pub fn bridging_area(kernel_hull: &[Point], kernel_hull_area: usize, region: &PixelRegion, width: usize, height: usize) -> i64 {
    let mut pts: Vec<Point> = kernel_hull.to_vec();
    pts.extend(pixel_hull(&region.pixels));
    let joint = crate::hull::convex_hull(&pts);
    hull_pixel_count(&joint, width, height) as i64 - kernel_hull_area as i64 - region.area as i64
}

/// Whether a peripheral region is reassigned to the background. The kernel is
/// held fixed, so each decision is independent of the others.
pub fn peripheral_is_removed(
    area: usize,
    kernel_area: usize,
    bridge: i64,
    min_size: usize,
    params: &ScsParams,
) -> bool {
    let a = area as f64;
    let too_small = a < params.theta1 * min_size as f64;
    let too_large = area > kernel_area;
    let proximity = match params.kernel_proximity {
        KernelProximity::AreaBelowBridge => (area as i64) < bridge,
        KernelProximity::AreaAboveBridge => (area as i64) > bridge,
    };
    too_small || too_large || proximity
}

/// Keep all kernel regions and the peripheral regions that pass the area and
/// proximity tests. `dims` is `(rows, cols)` of the working image.
pub fn peripheral_component_filter(part: &KernelPartition, dims: (usize, usize), params: &ScsParams) -> BinaryMask {
    let (w, h) = (part.width, part.height);
    let min_size = dims.0.min(dims.1);
    let mut out = BinaryMask::empty(w, h);
    for region in &part.kernel {
        region.paint(&mut out, true);
    }
    let hull = part.kernel_hull();
    for region in &part.peripheral {
        let bridge = bridging_area(&hull, part.kernel_hull_area, region, w, h);
        if !peripheral_is_removed(region.area, part.kernel_area, bridge, min_size, params) {
            region.paint(&mut out, true);
        }
    }
    out
}

/// Low-saliency candidates around the foreground and the colors that judge them.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionRegion {
    pub candidates: BinaryMask,
    /// Mean color of the candidates.
    pub mean_color: [f64; 3],
    /// Mean color of the remaining non-foreground pixels.
    pub background_mean_color: [f64; 3],
    /// `theta2 * d(background_mean_color, mean_color)`.
    pub cutoff: f64,
}

/// Mean colors of the foreground and of the background, if both are non-empty.
pub fn foreground_background_means(mask: &BinaryMask, image: &RgbImage) -> Option<([f64; 3], [f64; 3])> {
    let w = mask.width();
    let split = |want: bool| {
        mask.bits()
            .iter()
            .enumerate()
            .filter(move |(_, &b)| b == want)
            .map(move |(i, _)| (i / w, i % w))
    };
    if mask.is_blank() || mask.count() == mask.bits().len() {
        return None;
    }
    Some((mean_color_of(image, split(true)), mean_color_of(image, split(false))))
}

/// Build the transition region, or `None` when either side is empty.
///
/// With `foreground_affinity`, a low-saliency pixel is a candidate only when its
/// color is closer to the foreground mean than to the background mean.
pub fn transition_region(
    mask: &BinaryMask,
    sm: &SaliencyMap,
    image: &RgbImage,
    params: &ScsParams,
    metric: &dyn ColorMetric,
    rule: &dyn TransitionRule,
    mu_s: f64,
) -> Option<TransitionRegion> {
    let (w, h) = (mask.width(), mask.height());
    let affinity = params
        .foreground_affinity
        .then(|| foreground_background_means(mask, image))
        .flatten();
    let bits: Vec<bool> = mask
        .bits()
        .iter()
        .zip(sm.values())
        .enumerate()
        .map(|(i, (&fg, &s))| {
            if fg || !rule.is_candidate(s, params.ts, mu_s) {
                return false;
            }
            affinity.is_none_or(|(f, b)| {
                let p = to_f64(image.pixel(i));
                metric.distance(p, f) < metric.distance(p, b)
            })
        })
        .collect();
    let candidates = BinaryMask::new(w, h, bits).expect("same grid");
    let cand_pixels = candidates.foreground();
    let rest: Vec<(usize, usize)> = (0..w * h)
        .filter(|&i| !mask.bits()[i] && !candidates.bits()[i])
        .map(|i| (i / w, i % w))
        .collect();
    if cand_pixels.is_empty() || rest.is_empty() {
        return None;
    }
    let mean_color = mean_color_of(image, cand_pixels.into_iter());
    let background_mean_color = mean_color_of(image, rest.into_iter());
    let cutoff = params.theta2 * metric.distance(background_mean_color, mean_color);
    Some(TransitionRegion {
        candidates,
        mean_color,
        background_mean_color,
        cutoff,
    })
}

/// Candidates surviving the color test, before the connectivity step.
pub fn color_filtered_candidates(region: &TransitionRegion, image: &RgbImage, metric: &dyn ColorMetric) -> BinaryMask {
    let (w, h) = (image.width(), image.height());
    let bits = region
        .candidates
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &c)| c && metric.distance(to_f64(image.pixel(i)), region.mean_color) <= region.cutoff)
        .collect();
    BinaryMask::new(w, h, bits).expect("same grid")
}

/// Add the surviving transition pixels that are 8-connected to the foreground
/// through other survivors.
pub fn expand_foreground(
    mask: &BinaryMask,
    sm: &SaliencyMap,
    image: &RgbImage,
    params: &ScsParams,
    metric: &dyn ColorMetric,
    rule: &dyn TransitionRule,
    mu_s: f64,
) -> BinaryMask {
    let Some(region) = transition_region(mask, sm, image, params, metric, rule, mu_s) else {
        return mask.clone();
    };
    let survivors = color_filtered_candidates(&region, image, metric);
    grow_through(mask, &survivors, Connectivity::Eight)
}

/// Flood from `seed` through `passable` pixels.
pub(crate) fn grow_through(seed: &BinaryMask, passable: &BinaryMask, connectivity: Connectivity) -> BinaryMask {
    let (w, h) = (seed.width(), seed.height());
    let mut out = seed.clone();
    let mut queue: VecDeque<usize> = (0..w * h).filter(|&i| seed.bits()[i]).collect();
    while let Some(i) = queue.pop_front() {
        let (r, c) = (i / w, i % w);
        for &(dr, dc) in connectivity.offsets() {
            let nr = r as isize + dr;
            let nc = c as isize + dc;
            if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                continue;
            }
            let j = nr as usize * w + nc as usize;
            if passable.bits()[j] && !out.bits()[j] {
                out.bits_mut()[j] = true;
                queue.push_back(j);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::RgbEuclidean;
    use crate::segmentation::transition::BelowThreshold;

    /// Regions laid out as 2x2 blocks along a row, each with its own color.
    fn blocks(colors: &[Rgb]) -> (RgbImage, BinaryMask) {
        let w = colors.len() * 3 + 1;
        let at = |c: usize| (c % 3 != 0).then(|| (c - 1) / 3);
        let img = RgbImage::from_fn(w, 4, |r, c| match at(c) {
            Some(k) if (1..3).contains(&r) => colors[k],
            _ => [255, 255, 255],
        })
        .unwrap();
        let mask = BinaryMask::from_fn(w, 4, |r, c| (1..3).contains(&r) && at(c).is_some());
        (img, mask)
    }

    #[test]
    fn uniform_regions_are_untouched() {
        let (img, mask) = blocks(&[[40, 30, 30]; 3]);
        let (out, stats) = color_proximity_filter(&mask, &img, &ScsParams::default(), &RgbEuclidean);
        assert_eq!(out, mask);
        assert_eq!(stats.unwrap().delta, 0.0);
    }

    #[test]
    fn far_region_is_removed_when_spread_exceeds_tc() {
        let (img, mask) = blocks(&[[0, 0, 0], [20, 0, 0], [100, 0, 0]]);
        let (out, stats) = color_proximity_filter(&mask, &img, &ScsParams::default(), &RgbEuclidean);
        let stats = stats.unwrap();
        assert_eq!(stats.distances, vec![0.0, 20.0, 100.0]);
        assert_eq!((stats.delta, stats.small_delta), (100.0, 50.0));
        assert_eq!(out.count(), 8);
        assert!(out.get(1, 1) && out.get(1, 4) && !out.get(1, 7));
    }

    #[test]
    fn small_spread_keeps_everything() {
        let (img, mask) = blocks(&[[0, 0, 0], [55, 0, 0]]);
        let (out, _) = color_proximity_filter(&mask, &img, &ScsParams::default(), &RgbEuclidean);
        assert_eq!(out, mask);
    }

    #[test]
    fn empty_mask_passes_through() {
        let (img, _) = blocks(&[[0, 0, 0]]);
        let empty = BinaryMask::empty(img.width(), img.height());
        assert_eq!(color_proximity_filter(&empty, &img, &ScsParams::default(), &RgbEuclidean).0, empty);
    }

    fn square(r0: usize, c0: usize, side: usize) -> Vec<(usize, usize)> {
        (r0..r0 + side).flat_map(|r| (c0..c0 + side).map(move |c| (r, c))).collect()
    }

    #[test]
    fn kernel_needs_tn_strong_pixels() {
        let pixels = square(10, 10, 10);
        let mask = BinaryMask::from_pixels(40, 40, &pixels);
        let sm = SaliencyMap::from_fn(40, 40, |r, c| if mask.get(r, c) { 255.0 } else { 0.0 }).unwrap();
        let part = partition_kernel_peripheral(&mask, &sm, 50.0, &ScsParams::default());
        assert_eq!(part.kernel.len(), 1);
        assert!(part.peripheral.is_empty());
        assert_eq!(part.kernel_area, 100);
        assert_eq!(part.kernel_hull_area, 100);
    }

    #[test]
    fn exact_double_mean_is_not_strong() {
        let mut pixels = square(2, 2, 10);
        pixels.extend(square(20, 20, 12));
        let mask = BinaryMask::from_pixels(40, 40, &pixels);
        let sm = SaliencyMap::from_fn(40, 40, |r, c| if mask.get(r, c) { 100.0 } else { 0.0 }).unwrap();
        let part = partition_kernel_peripheral(&mask, &sm, 50.0, &ScsParams::default());
        // both peripheral by count; the larger is promoted
        assert_eq!(part.kernel.len(), 1);
        assert_eq!(part.kernel[0].area, 144);
        assert_eq!(part.peripheral.len(), 1);
    }

    #[test]
    fn peripheral_area_rules() {
        let p = ScsParams::default();
        // 0.2 * 500 = 100
        assert!(peripheral_is_removed(80, 3000, -1000, 500, &p));
        assert!(peripheral_is_removed(5000, 3000, -1000, 500, &p));
        assert!(!peripheral_is_removed(200, 3000, 40, 500, &p));
        assert!(peripheral_is_removed(200, 3000, 900, 500, &p));
        let inverted = ScsParams {
            kernel_proximity: KernelProximity::AreaAboveBridge,
            ..p
        };
        assert!(peripheral_is_removed(200, 3000, 40, 500, &inverted));
    }

    #[test]
    fn peripheral_filter_keeps_kernel_and_near_neighbours() {
        // kernel 40x40, a 10x20 neighbour touching its side, a 10x20 far away
        let (w, h) = (100, 100);
        let kernel = square(30, 30, 40);
        let near: Vec<_> = (40..60).flat_map(|r| (71..81).map(move |c| (r, c))).collect();
        let far: Vec<_> = (85..95).flat_map(|r| (2..22).map(move |c| (r, c))).collect();
        let mut all = kernel.clone();
        all.extend(&near);
        all.extend(&far);
        let mask = BinaryMask::from_pixels(w, h, &all);
        let sm = SaliencyMap::from_fn(w, h, |r, c| {
            if kernel.contains(&(r, c)) {
                255.0
            } else if mask.get(r, c) {
                60.0
            } else {
                0.0
            }
        })
        .unwrap();
        let part = partition_kernel_peripheral(&mask, &sm, 50.0, &ScsParams::default());
        assert_eq!(part.kernel.len(), 1);
        assert_eq!(part.peripheral.len(), 2);
        let hull = part.kernel_hull();
        let ads: Vec<i64> = part
            .peripheral
            .iter()
            .map(|r| bridging_area(&hull, part.kernel_hull_area, r, w, h))
            .collect();
        let out = peripheral_component_filter(&part, (h, w), &ScsParams::default());
        assert!(ads[0] < 200, "near AD {}", ads[0]);
        assert!(ads[1] > 200, "far AD {}", ads[1]);
        assert!(out.get(50, 75));
        assert!(!out.get(90, 10));
        assert!(kernel.iter().all(|&(r, c)| out.get(r, c)));
    }

    fn expansion_fixture() -> (BinaryMask, SaliencyMap, RgbImage) {
        // foreground block, an adjacent low-saliency blob and an isolated one, both lesion-colored
        let (w, h) = (30, 12);
        let fg = BinaryMask::from_fn(w, h, |r, c| (4..8).contains(&r) && (4..8).contains(&c));
        let adjacent = |r: usize, c: usize| (4..8).contains(&r) && (8..11).contains(&c);
        let isolated = |r: usize, c: usize| (4..8).contains(&r) && (20..23).contains(&c);
        let img = RgbImage::from_fn(w, h, |r, c| {
            if fg.get(r, c) || adjacent(r, c) || isolated(r, c) {
                [60, 40, 40]
            } else {
                [220, 200, 190]
            }
        })
        .unwrap();
        let sm = SaliencyMap::from_fn(w, h, |r, c| {
            if fg.get(r, c) {
                255.0
            } else if adjacent(r, c) || isolated(r, c) {
                5.0
            } else {
                40.0
            }
        })
        .unwrap();
        (fg, sm, img)
    }

    #[test]
    fn only_connected_survivors_join() {
        let (fg, sm, img) = expansion_fixture();
        let out = expand_foreground(&fg, &sm, &img, &ScsParams::default(), &RgbEuclidean, &BelowThreshold, 50.0);
        assert!(fg.is_subset_of(&out));
        assert_eq!(out.count(), 16 + 12);
        assert!(out.get(5, 9) && !out.get(5, 21));
    }

    #[test]
    fn no_candidates_means_no_change() {
        let (fg, _, img) = expansion_fixture();
        let sm = SaliencyMap::from_fn(30, 12, |_, _| 100.0).unwrap();
        let out = expand_foreground(&fg, &sm, &img, &ScsParams::default(), &RgbEuclidean, &BelowThreshold, 50.0);
        assert_eq!(out, fg);
    }

    #[test]
    fn color_cutoff_example() {
        // d(C_b, C_m) = 50 with theta2 0.8 gives cutoff 40
        let region = TransitionRegion {
            candidates: BinaryMask::full(2, 1),
            mean_color: [100.0, 100.0, 100.0],
            background_mean_color: [150.0, 100.0, 100.0],
            cutoff: 0.8 * 50.0,
        };
        let img = RgbImage::new(2, 1, vec![145, 100, 100, 130, 100, 100]).unwrap();
        let kept = color_filtered_candidates(&region, &img, &RgbEuclidean);
        assert_eq!(kept.bits(), &[false, true]);
    }

    #[test]
    fn skin_colored_candidates_need_foreground_affinity() {
        // the whole skin field sits below ts; only the affinity test keeps it out
        let (w, h) = (20, 20);
        let fg = BinaryMask::from_fn(w, h, |r, c| (6..14).contains(&r) && (6..14).contains(&c));
        let img = RgbImage::from_fn(w, h, |r, c| if fg.get(r, c) { [70, 40, 40] } else { [210, 180, 160] }).unwrap();
        let sm = SaliencyMap::from_fn(w, h, |r, c| {
            if fg.get(r, c) {
                255.0
            } else if r == 0 {
                30.0
            } else {
                0.0
            }
        })
        .unwrap();
        let params = ScsParams::default();
        let out = expand_foreground(&fg, &sm, &img, &params, &RgbEuclidean, &BelowThreshold, 50.0);
        assert_eq!(out, fg);
        let literal = ScsParams {
            foreground_affinity: false,
            ..ScsParams::default()
        };
        let flooded = expand_foreground(&fg, &sm, &img, &literal, &RgbEuclidean, &BelowThreshold, 50.0);
        assert_eq!(flooded.count(), w * h - w);
    }
}
