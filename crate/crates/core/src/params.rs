//! Every tunable of the pipeline in one place.

use crate::components::Connectivity;
use crate::error::{Error, Result};

/// Direction of the kernel-proximity test in the peripheral-component criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelProximity {
    /// Remove a peripheral region when its area is below the hull-bridging area.
    AreaBelowBridge,
    /// Remove a peripheral region when its area is above the hull-bridging area.
    AreaAboveBridge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScsParams {
    /// Longest side of the working image.
    pub maxdim: usize,
    /// Palette size for color quantization.
    pub colnum: usize,
    /// Color-spread threshold of the color-proximity criterion.
    pub tc: f64,
    /// Minimum count of strongly salient pixels for a kernel component.
    pub tn: usize,
    /// Fraction of the smaller image side below which a peripheral area is negligible.
    pub theta1: f64,
    /// Saliency ceiling for transition-region candidates, on the stretched scale.
    pub ts: f64,
    /// Fraction of the background-to-transition color distance tolerated for a candidate.
    pub theta2: f64,
    /// Admit a transition candidate only if its color is nearer the foreground
    /// mean than the background mean.
    pub foreground_affinity: bool,
    /// Foreground connectivity; background components always use the dual.
    pub connectivity: Connectivity,
    pub max_binarize_iters: usize,
    /// Keep only the largest component at the end.
    pub single_lesion: bool,
    /// Replace the final component by its convex hull.
    pub compute_hull: bool,
    /// Seed for stochastic strategies (color quantization sampling).
    pub seed: u64,
    pub hair_removal: bool,
    /// Linear structuring element length as a fraction of the smaller side.
    pub hair_length_frac: f64,
    /// Gray-level excess of the closing over the input that marks hair.
    pub hair_threshold: f64,
    /// Hair components smaller than this are discarded.
    pub hair_min_area: usize,
    /// Contour-smoothing disk radius as a fraction of the smaller side.
    pub smooth_radius_frac: f64,
    pub kernel_proximity: KernelProximity,
    /// Registered name of the color quantizer.
    pub quantizer: String,
    /// Registered name of the saliency model.
    pub saliency: String,
    /// Registered name of the color metric.
    pub color_metric: String,
    /// Registered name of the transition-candidate rule.
    pub transition: String,
}

impl Default for ScsParams {
    fn default() -> Self {
        Self {
            maxdim: 500,
            colnum: 64,
            tc: 60.0,
            tn: 50,
            theta1: 0.2,
            ts: 10.0,
            theta2: 0.8,
            foreground_affinity: true,
            connectivity: Connectivity::Eight,
            max_binarize_iters: 10,
            single_lesion: true,
            compute_hull: true,
            seed: 0,
            hair_removal: true,
            hair_length_frac: 0.05,
            hair_threshold: 25.0,
            hair_min_area: 30,
            smooth_radius_frac: 0.01,
            kernel_proximity: KernelProximity::AreaBelowBridge,
            quantizer: "som".into(),
            saliency: "frequency-tuned".into(),
            color_metric: "rgb".into(),
            transition: "below-ts".into(),
        }
    }
}

fn bad(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}

impl ScsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta1 > 0.0 && self.theta1 < 1.0) {
            return Err(bad("theta1", format!("{} not in (0, 1)", self.theta1)));
        }
        if !(self.theta2 > 0.0 && self.theta2 < 1.0) {
            return Err(bad("theta2", format!("{} not in (0, 1)", self.theta2)));
        }
        if !(0.0..=255.0).contains(&self.ts) {
            return Err(bad("ts", format!("{} not in [0, 255]", self.ts)));
        }
        if !(self.tc > 0.0) {
            return Err(bad("tc", format!("{} must be positive", self.tc)));
        }
        if self.colnum < 2 {
            return Err(bad("colnum", format!("{} must be at least 2", self.colnum)));
        }
        if self.maxdim < 16 {
            return Err(bad("maxdim", format!("{} must be at least 16", self.maxdim)));
        }
        if self.max_binarize_iters == 0 {
            return Err(bad("max_binarize_iters", "must be at least 1"));
        }
        if !(self.hair_length_frac >= 0.0 && self.smooth_radius_frac >= 0.0) {
            return Err(bad("hair_length_frac", "fractions must be non-negative"));
        }
        Ok(())
    }
}
