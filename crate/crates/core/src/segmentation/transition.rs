//! Rules selecting the low-saliency pixels that may join the foreground.

use crate::registry::Strategy;

pub trait TransitionRule: Strategy {
    /// Whether a non-foreground pixel with `saliency` enters the transition region.
    /// `ts` is the configured ceiling, `mu_s` the final binarization threshold.
    fn is_candidate(&self, saliency: f64, ts: f64, mu_s: f64) -> bool;
}

/// Every pixel with saliency strictly below `ts`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BelowThreshold;

impl Strategy for BelowThreshold {
    fn name(&self) -> &'static str {
        "below-ts"
    }
}

impl TransitionRule for BelowThreshold {
    fn is_candidate(&self, saliency: f64, ts: f64, _mu_s: f64) -> bool {
        saliency < ts
    }
}

/// Pixels between `ts` (inclusive) and the binarization threshold (exclusive).
#[derive(Clone, Copy, Debug, Default)]
pub struct SaliencyBand;

impl Strategy for SaliencyBand {
    fn name(&self) -> &'static str {
        "band"
    }
}

impl TransitionRule for SaliencyBand {
    fn is_candidate(&self, saliency: f64, ts: f64, mu_s: f64) -> bool {
        ts <= saliency && saliency < mu_s
    }
}
