use image::imageops::{self, FilterType};

use crate::raster::RgbImage;

/// Output dimensions for a longest side of `maxdim`; never upscales.
pub fn target_dims(width: usize, height: usize, maxdim: usize) -> (usize, usize) {
    let longest = width.max(height);
    if longest <= maxdim {
        return (width, height);
    }
    let scale = |side: usize| ((side * maxdim * 2 + longest) / (2 * longest)).max(1);
    if width >= height {
        (maxdim, scale(height))
    } else {
        (scale(width), maxdim)
    }
}

/// Bicubic downsampling so that the longest side equals `maxdim`.
pub fn resize_max_dim(image: &RgbImage, maxdim: usize) -> RgbImage {
    let (w, h) = target_dims(image.width(), image.height(), maxdim);
    if (w, h) == (image.width(), image.height()) {
        return image.clone();
    }
    let out = imageops::resize(&image.to_image(), w as u32, h as u32, FilterType::CatmullRom);
    RgbImage::from_image(&out).expect("resize yields a non-empty image")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn never_upscales() {
        let img = RgbImage::filled(400, 300, [1, 2, 3]).unwrap();
        assert_eq!(resize_max_dim(&img, 500), img);
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(target_dims(1000, 800, 500), (500, 400));
        assert_eq!(target_dims(760, 560, 500), (500, 368));
        assert_eq!(target_dims(560, 760, 500), (368, 500));
        assert_eq!(target_dims(5000, 2, 500), (500, 1));
    }

    #[test]
    fn resampling_keeps_constant_images_constant() {
        let img = RgbImage::filled(1000, 800, [210, 180, 160]).unwrap();
        let out = resize_max_dim(&img, 500);
        assert_eq!((out.width(), out.height()), (500, 400));
        assert!(out.pixels().all(|p| p == [210, 180, 160]));
    }

    #[test]
    fn aspect_ratio_within_rounding() {
        for (w, h) in [(760, 560), (4288, 2848), (718, 542), (1001, 999), (640, 17)] {
            let (ow, oh) = target_dims(w, h, 500);
            let err = (oh as f64 / ow as f64 - h as f64 / w as f64).abs();
            assert!(err <= 2.0 / ow as f64, "{w}x{h} -> {ow}x{oh}");
        }
    }
}
