//! Size and color reduction, hair removal, and saliency construction.

pub mod hair;
pub mod quantize;
pub mod resize;
pub mod saliency;

pub use hair::{detect_hair, remove_hair, HairMask, HairParams};
pub use quantize::{quantize_colors, ColorQuantizer, MedianCut, Palette, SomQuantizer};
pub use resize::{resize_max_dim, target_dims};
pub use saliency::{stretch_contrast, FrequencyTuned, SaliencyModel};

use crate::params::ScsParams;
use crate::raster::{RgbImage, SaliencyMap};
use crate::registry::Strategies;

/// Everything the segmentation stage reads, at working resolution.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub reduced: RgbImage,
    pub palette: Palette,
    pub hair: HairMask,
    /// Quantized and de-haired image; every pixel is a palette color.
    pub image: RgbImage,
    /// Contrast-stretched saliency of `image`.
    pub saliency: SaliencyMap,
}

/// Resize, quantize, remove hair, then build and stretch the saliency map.
pub fn preprocess(input: &RgbImage, params: &ScsParams, strategies: &Strategies) -> Preprocessed {
    let reduced = resize_max_dim(input, params.maxdim);
    let (quantized, palette) =
        quantize_colors(&reduced, params.colnum, strategies.quantizer.as_ref(), params.seed);

    let hair_params = HairParams::for_min_size(
        quantized.min_size(),
        params.hair_length_frac,
        params.hair_threshold,
        params.hair_min_area,
    );
    let hair = if params.hair_removal {
        detect_hair(&quantized, &hair_params)
    } else {
        HairMask(crate::raster::BinaryMask::empty(quantized.width(), quantized.height()))
    };
    let image = if hair.count() == 0 {
        quantized
    } else {
        // inpainted colors are snapped back onto the palette
        let inpainted = remove_hair(&quantized, &hair).expect("same grid");
        palette.remap(&inpainted)
    };

    let saliency = stretch_contrast(&strategies.saliency.compute(&image));
    Preprocessed {
        reduced,
        palette,
        hair,
        image,
        saliency,
    }
}
