//! Saliency and color based segmentation of dermoscopic skin-lesion images.
//!
//! The pipeline reduces the image size and palette, removes hair, builds a
//! contrast-stretched saliency map, and then grows a binary lesion mask with
//! an iterated mean-threshold binarization followed by color-proximity,
//! peripheral-component and foreground-expansion criteria. The surviving
//! foreground is smoothed, reduced to its largest component and replaced by
//! its convex hull.
//!
//! ```no_run
//! use scs_core::{dataset, segment, ScsParams};
//!
//! let image = dataset::load_image("lesion.png").unwrap();
//! let result = segment(&image, &ScsParams::default()).unwrap();
//! println!("{} lesion pixels", result.mask_full.count());
//! ```
//!
//! Quantizers, saliency models, color metrics and transition rules are
//! strategies registered by name; see [`registry`].

pub mod color;
pub mod components;
pub mod dataset;
pub mod error;
pub mod hull;
pub mod metrics;
pub mod morphology;
pub mod params;
pub mod phantom;
pub mod preprocess;
pub mod raster;
pub mod registry;
pub mod segmentation;

pub use components::{label_components, Connectivity, PixelRegion, Polarity};
pub use error::{Error, Result};
pub use params::{KernelProximity, ScsParams};
pub use raster::{BinaryMask, Grid, Rgb, RgbImage, SaliencyMap};
pub use registry::Strategies;
pub use segmentation::{segment, LesionResult, Segmenter};
