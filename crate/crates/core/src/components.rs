//! Connected-component labelling of binary masks.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, RgbImage, SaliencyMap};

/// Pixel adjacency used when growing components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            4 => Some(Self::Four),
            8 => Some(Self::Eight),
            _ => None,
        }
    }

    pub fn count(self) -> u8 {
        match self {
            Self::Four => 4,
            Self::Eight => 8,
        }
    }

    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        match self {
            Self::Four => &FOUR,
            Self::Eight => &EIGHT,
        }
    }
}

/// Which pixel value is being labelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Foreground,
    Background,
}

/// One connected component.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelRegion {
    /// Member pixels as `(row, col)`, in raster order.
    pub pixels: Vec<(usize, usize)>,
    pub area: usize,
    pub touches_frame: bool,
}

impl PixelRegion {
    /// Average color over member pixels.
    pub fn mean_color(&self, image: &RgbImage) -> [f64; 3] {
        mean_color_of(image, self.pixels.iter().copied())
    }

    pub fn mean_saliency(&self, sm: &SaliencyMap) -> f64 {
        self.pixels.iter().map(|&(r, c)| sm.get(r, c)).sum::<f64>() / self.area as f64
    }

    /// Raster-order first pixel; used to break ties deterministically.
    pub fn first_pixel(&self) -> (usize, usize) {
        self.pixels[0]
    }

    /// Paint this region into `mask` with `value`.
    pub fn paint(&self, mask: &mut BinaryMask, value: bool) {
        for &(r, c) in &self.pixels {
            mask.set(r, c, value);
        }
    }
}

pub(crate) fn mean_color_of(image: &RgbImage, pixels: impl Iterator<Item = (usize, usize)>) -> [f64; 3] {
    let mut sum = [0.0f64; 3];
    let mut n = 0usize;
    for (r, c) in pixels {
        let p = image.get(r, c);
        for k in 0..3 {
            sum[k] += p[k] as f64;
        }
        n += 1;
    }
    if n == 0 {
        return [0.0; 3];
    }
    sum.map(|s| s / n as f64)
}

/// Label connected components of the requested polarity.
///
/// Regions are returned in raster order of their first pixel.
pub fn label_components(
    mask: &BinaryMask,
    connectivity: Connectivity,
    polarity: Polarity,
) -> Result<Vec<PixelRegion>> {
    let (w, h) = (mask.width(), mask.height());
    if w == 0 || h == 0 {
        return Err(Error::InvalidInput("cannot label a zero-sized grid".into()));
    }
    let want = polarity == Polarity::Foreground;
    let bits = mask.bits();
    let mut visited = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        if visited[start] || bits[start] != want {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        let mut touches_frame = false;
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            touches_frame |= r == 0 || c == 0 || r == h - 1 || c == w - 1;
            pixels.push((r, c));
            for &(dr, dc) in connectivity.offsets() {
                let nr = r as isize + dr;
                let nc = c as isize + dc;
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let j = nr as usize * w + nc as usize;
                if !visited[j] && bits[j] == want {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
        pixels.sort_unstable();
        regions.push(PixelRegion {
            area: pixels.len(),
            pixels,
            touches_frame,
        });
    }
    Ok(regions)
}

/// Index of the largest region; ties go to the region whose first pixel is topmost-leftmost.
pub fn largest_region(regions: &[PixelRegion]) -> Option<usize> {
    regions
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.area
                .cmp(&b.area)
                .then_with(|| b.first_pixel().cmp(&a.first_pixel()))
        })
        .map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_foreground_has_no_regions() {
        let mask = BinaryMask::empty(4, 4);
        let regions = label_components(&mask, Connectivity::Eight, Polarity::Foreground).unwrap();
        assert!(regions.is_empty());
    }

    #[test]
    fn isolated_corner_pixels() {
        let mask = BinaryMask::from_pixels(4, 4, &[(0, 0), (3, 3)]);
        let regions = label_components(&mask, Connectivity::Eight, Polarity::Foreground).unwrap();
        assert_eq!(regions.len(), 2);
        assert!(regions.iter().all(|r| r.area == 1 && r.touches_frame));
    }

    #[test]
    fn diagonal_join_depends_on_connectivity() {
        let mask = BinaryMask::from_pixels(5, 5, &[(1, 1), (1, 2), (2, 2), (3, 3)]);
        let eight = label_components(&mask, Connectivity::Eight, Polarity::Foreground).unwrap();
        assert_eq!(eight.len(), 1);
        assert_eq!(eight[0].area, 4);
        assert!(!eight[0].touches_frame);
        let four = label_components(&mask, Connectivity::Four, Polarity::Foreground).unwrap();
        assert_eq!(four.len(), 2);
        assert_eq!(four[0].area, 3);
        assert_eq!(four[1].pixels, vec![(3, 3)]);
    }

    #[test]
    fn zero_grid_is_rejected() {
        let mask = BinaryMask::empty(0, 3);
        assert!(label_components(&mask, Connectivity::Four, Polarity::Background).is_err());
    }

    #[test]
    fn largest_breaks_ties_by_position() {
        let mask = BinaryMask::from_pixels(6, 6, &[(0, 4), (4, 0)]);
        let regions = label_components(&mask, Connectivity::Eight, Polarity::Foreground).unwrap();
        assert_eq!(regions[largest_region(&regions).unwrap()].first_pixel(), (0, 4));
    }
}
