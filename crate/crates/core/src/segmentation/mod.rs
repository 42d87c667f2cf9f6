//! Binary mask construction and lesion detection on top of the preprocessed image.

pub mod binarize;
pub mod criteria;
pub mod finalize;
pub mod transition;

pub use binarize::{binarize_iterative, BinarizationTrace};
pub use criteria::{
    color_proximity_filter, expand_foreground, partition_kernel_peripheral, peripheral_component_filter,
    ColorProximityStats, KernelPartition, TransitionRegion,
};
pub use finalize::{fallback_disk, finalize_lesion};
pub use transition::TransitionRule;

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hull::{convex_hull, pixel_hull, rasterize_convex_polygon, Point};
use crate::params::ScsParams;
use crate::preprocess::{preprocess, Preprocessed};
use crate::raster::{BinaryMask, RgbImage};
use crate::registry::Strategies;

/// Smallest accepted input side.
pub const MIN_INPUT_SIDE: usize = 16;

/// Names of the recorded stages, in pipeline order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Preprocess,
    Binarize,
    ColorProximity,
    PeripheralFilter,
    Expansion,
    Finalize,
    Upscale,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Preprocess => "preprocess",
            Stage::Binarize => "binarize",
            Stage::ColorProximity => "color_proximity",
            Stage::PeripheralFilter => "peripheral_filter",
            Stage::Expansion => "expansion",
            Stage::Finalize => "finalize",
            Stage::Upscale => "upscale",
        }
    }
}

/// Per-stage record for debugging and reporting.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub stage: Stage,
    /// Mask after the stage, at working resolution (absent for preprocessing and upscaling).
    pub mask: Option<BinaryMask>,
    /// Set when the stage emptied the mask and its input was restored.
    pub skipped: bool,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct LesionResult {
    pub mask_reduced: BinaryMask,
    pub mask_full: BinaryMask,
    /// Final hull polygon in full-resolution continuous coordinates `(x, y)`.
    pub boundary: Vec<(f64, f64)>,
    pub low_confidence: bool,
    pub binarization: BinarizationTrace,
    pub color_stats: Option<ColorProximityStats>,
    pub stages: Vec<StageRecord>,
    pub preprocessed: Preprocessed,
}

impl LesionResult {
    pub fn stage(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == stage)
    }
}

/// Full pipeline with resolved strategies; cheap to clone and share across threads.
#[derive(Clone, Debug)]
pub struct Segmenter {
    params: ScsParams,
    strategies: Strategies,
}

impl Segmenter {
    pub fn new(params: ScsParams) -> Result<Self> {
        params.validate()?;
        let strategies = Strategies::from_params(&params)?;
        Ok(Self { params, strategies })
    }

    pub fn with_strategies(params: ScsParams, strategies: Strategies) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, strategies })
    }

    pub fn params(&self) -> &ScsParams {
        &self.params
    }

    pub fn strategies(&self) -> &Strategies {
        &self.strategies
    }

    pub fn segment(&self, image: &RgbImage) -> Result<LesionResult> {
        if image.width() < MIN_INPUT_SIDE || image.height() < MIN_INPUT_SIDE {
            return Err(Error::InvalidInput(format!(
                "image is {}x{}, both sides must be at least {MIN_INPUT_SIDE}",
                image.width(),
                image.height()
            )));
        }
        let params = &self.params;
        let s = &self.strategies;
        let mut stages = Vec::new();

        let t = Instant::now();
        let pre = preprocess(image, params, s);
        stages.push(StageRecord {
            stage: Stage::Preprocess,
            mask: None,
            skipped: false,
            elapsed: t.elapsed(),
        });
        let (img, sm) = (&pre.image, &pre.saliency);
        let dims = (img.height(), img.width());

        let t = Instant::now();
        let binarization = binarize_iterative(sm, params);
        let mu_s = binarization.final_threshold();
        let mut mask = binarization.final_mask.clone();
        stages.push(StageRecord {
            stage: Stage::Binarize,
            mask: Some(mask.clone()),
            skipped: false,
            elapsed: t.elapsed(),
        });

        let mut guarded = |stage: Stage, mask: &mut BinaryMask, run: &mut dyn FnMut(&BinaryMask) -> BinaryMask| {
            let t = Instant::now();
            let next = run(mask);
            let skipped = next.is_blank() && !mask.is_blank();
            if !skipped {
                *mask = next;
            }
            stages.push(StageRecord {
                stage,
                mask: Some(mask.clone()),
                skipped,
                elapsed: t.elapsed(),
            });
        };

        let mut color_stats = None;
        guarded(Stage::ColorProximity, &mut mask, &mut |m| {
            let (out, stats) = color_proximity_filter(m, img, params, s.metric.as_ref());
            color_stats = stats;
            out
        });
        guarded(Stage::PeripheralFilter, &mut mask, &mut |m| {
            if m.is_blank() {
                return m.clone();
            }
            let part = partition_kernel_peripheral(m, sm, mu_s, params);
            peripheral_component_filter(&part, dims, params)
        });
        guarded(Stage::Expansion, &mut mask, &mut |m| {
            if m.is_blank() {
                return m.clone();
            }
            expand_foreground(m, sm, img, params, s.metric.as_ref(), s.transition.as_ref(), mu_s)
        });

        let t = Instant::now();
        let (mask_reduced, low_confidence) = finalize_lesion(&mask, params);
        stages.push(StageRecord {
            stage: Stage::Finalize,
            mask: Some(mask_reduced.clone()),
            skipped: false,
            elapsed: t.elapsed(),
        });

        let t = Instant::now();
        let (mask_full, boundary) = upscale(&mask_reduced, image.width(), image.height(), params.compute_hull);
        stages.push(StageRecord {
            stage: Stage::Upscale,
            mask: None,
            skipped: false,
            elapsed: t.elapsed(),
        });

        Ok(LesionResult {
            mask_reduced,
            mask_full,
            boundary,
            low_confidence,
            binarization,
            color_stats,
            stages,
            preprocessed: pre,
        })
    }
}

/// Segment one image with the given parameters.
pub fn segment(image: &RgbImage, params: &ScsParams) -> Result<LesionResult> {
    Segmenter::new(params.clone())?.segment(image)
}

/// Hull polygon of a mask's pixel squares, scaled to a `(width, height)` grid.
pub fn scaled_hull_polygon(mask: &BinaryMask, width: usize, height: usize) -> Vec<(f64, f64)> {
    let centres = pixel_hull(&mask.foreground());
    let corners: Vec<Point> = centres
        .iter()
        .flat_map(|&(x, y)| [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)])
        .collect();
    let sx = width as f64 / mask.width() as f64;
    let sy = height as f64 / mask.height() as f64;
    convex_hull(&corners)
        .into_iter()
        .map(|(x, y)| (x as f64 * sx, y as f64 * sy))
        .collect()
}

/// Nearest-neighbour resampling of a mask onto another grid.
pub fn upsample_nearest(mask: &BinaryMask, width: usize, height: usize) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    BinaryMask::from_fn(width, height, |r, c| {
        let rr = (((r as f64 + 0.5) * h as f64 / height as f64) as usize).min(h - 1);
        let cc = (((c as f64 + 0.5) * w as f64 / width as f64) as usize).min(w - 1);
        mask.get(rr, cc)
    })
}

fn upscale(mask: &BinaryMask, width: usize, height: usize, hull: bool) -> (BinaryMask, Vec<(f64, f64)>) {
    if mask.is_blank() {
        return (BinaryMask::empty(width, height), Vec::new());
    }
    let polygon = scaled_hull_polygon(mask, width, height);
    if (mask.width(), mask.height()) == (width, height) {
        return (mask.clone(), polygon);
    }
    let full = if hull {
        rasterize_convex_polygon(&polygon, width, height)
    } else {
        upsample_nearest(mask, width, height)
    };
    (full, polygon)
}
