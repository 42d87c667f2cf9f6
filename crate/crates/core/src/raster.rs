//! Raster containers shared by every pipeline stage.

use crate::error::{Error, Result};

/// An 8-bit RGB triple.
pub type Rgb = [u8; 3];

/// Row-major 8-bit three-channel image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "image must be non-empty, got {width}x{height}"
            )));
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidInput(format!(
                "expected {} bytes for a {width}x{height} image, got {}",
                width * height * 3,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self> {
        let data = color
            .iter()
            .copied()
            .cycle()
            .take(width * height * 3)
            .collect();
        Self::new(width, height, data)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * 3);
        for row in 0..height {
            for col in 0..width {
                data.extend_from_slice(&f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smaller of the two grid dimensions.
    pub fn min_size(&self) -> usize {
        self.width.min(self.height)
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Rgb {
        self.pixel(row * self.width + col)
    }

    pub fn set(&mut self, row: usize, col: usize, color: Rgb) {
        let i = (row * self.width + col) * 3;
        self.data[i..i + 3].copy_from_slice(&color);
    }

    /// Pixel at a flat row-major index.
    pub fn pixel(&self, index: usize) -> Rgb {
        let i = index * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn same_grid<T: Grid>(&self, other: &T) -> bool {
        self.width == other.grid_width() && self.height == other.grid_height()
    }

    pub fn to_image(&self) -> image::RgbImage {
        image::RgbImage::from_raw(self.width as u32, self.height as u32, self.data.clone())
            .expect("buffer length checked at construction")
    }

    pub fn from_image(img: &image::RgbImage) -> Result<Self> {
        Self::new(img.width() as usize, img.height() as usize, img.as_raw().clone())
    }
}

/// Anything laid out on a `width x height` grid.
pub trait Grid {
    fn grid_width(&self) -> usize;
    fn grid_height(&self) -> usize;
}

impl Grid for RgbImage {
    fn grid_width(&self) -> usize {
        self.width
    }
    fn grid_height(&self) -> usize {
        self.height
    }
}

impl Grid for SaliencyMap {
    fn grid_width(&self) -> usize {
        self.width
    }
    fn grid_height(&self) -> usize {
        self.height
    }
}

impl Grid for BinaryMask {
    fn grid_width(&self) -> usize {
        self.width
    }
    fn grid_height(&self) -> usize {
        self.height
    }
}

pub(crate) fn check_grid<A: Grid, B: Grid>(a: &A, b: &B) -> Result<()> {
    if a.grid_width() != b.grid_width() || a.grid_height() != b.grid_height() {
        return Err(Error::DimensionMismatch {
            left_w: a.grid_width(),
            left_h: a.grid_height(),
            right_w: b.grid_width(),
            right_h: b.grid_height(),
        });
    }
    Ok(())
}

/// Per-pixel saliency on `[0, 255]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    /// Values are clamped into `[0, 255]`; NaN becomes 0.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "saliency map must be non-empty, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "expected {} saliency values, got {}",
                width * height,
                values.len()
            )));
        }
        let values = values
            .into_iter()
            .map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 255.0) })
            .collect();
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-pixel foreground flags; `true` is foreground.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "expected {} mask bits, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Mask with exactly the listed `(row, col)` pixels set; out-of-grid pixels are ignored.
    pub fn from_pixels(width: usize, height: usize, pixels: &[(usize, usize)]) -> Self {
        let mut mask = Self::empty(width, height);
        for &(r, c) in pixels {
            if r < height && c < width {
                mask.set(r, c, true);
            }
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_blank(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> Vec<(usize, usize)> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i / self.width, i % self.width))
            .collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Pixel-wise OR. Grids must match.
    pub fn union(&self, other: &Self) -> Result<Self> {
        check_grid(self, other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        })
    }

    /// True when every foreground pixel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// 8-bit grayscale rendering, 255 for foreground.
    pub fn to_gray_image(&self) -> image::GrayImage {
        let raw = self.bits.iter().map(|&b| if b { 255u8 } else { 0 }).collect();
        image::GrayImage::from_raw(self.width as u32, self.height as u32, raw)
            .expect("buffer length matches grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_buffers() {
        assert!(RgbImage::new(0, 4, vec![]).is_err());
        assert!(RgbImage::new(2, 2, vec![0; 11]).is_err());
        assert!(RgbImage::new(2, 2, vec![0; 12]).is_ok());
        assert!(BinaryMask::new(2, 2, vec![true; 3]).is_err());
    }

    #[test]
    fn saliency_values_are_clamped() {
        let sm = SaliencyMap::new(3, 1, vec![-4.0, 300.0, f64::NAN]).unwrap();
        assert_eq!(sm.values(), &[0.0, 255.0, 0.0]);
    }

    #[test]
    fn mask_set_algebra() {
        let a = BinaryMask::from_pixels(3, 3, &[(0, 0), (1, 1)]);
        let b = BinaryMask::from_pixels(3, 3, &[(1, 1)]);
        assert!(b.is_subset_of(&a));
        assert!(!a.is_subset_of(&b));
        assert_eq!(a.union(&b).unwrap(), a);
        assert_eq!(a.complement().count(), 7);
        assert_eq!(a.foreground(), vec![(0, 0), (1, 1)]);
    }
}
