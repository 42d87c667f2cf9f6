//! Name-keyed registries of interchangeable pipeline strategies.

use std::sync::Arc;

use crate::color::{CieLab76, ColorMetric, RgbEuclidean};
use crate::error::{Error, Result};
use crate::params::ScsParams;
use crate::preprocess::quantize::{ColorQuantizer, MedianCut, SomQuantizer};
use crate::preprocess::saliency::{FrequencyTuned, SaliencyModel};
use crate::segmentation::transition::{BelowThreshold, SaliencyBand, TransitionRule};

/// Common face of every pluggable strategy.
pub trait Strategy: Send + Sync {
    /// Name the strategy is registered and selected under.
    fn name(&self) -> &'static str;
}

/// Strategies of one kind, looked up by name.
pub struct Registry<T: ?Sized + Strategy> {
    kind: &'static str,
    entries: Vec<Arc<T>>,
}

impl<T: ?Sized + Strategy> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy, replacing any existing entry with the same name.
    pub fn register(&mut self, strategy: Arc<T>) {
        let name = strategy.name();
        self.entries.retain(|s| s.name() != name);
        self.entries.push(strategy);
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

pub fn quantizers() -> Registry<dyn ColorQuantizer> {
    let mut r: Registry<dyn ColorQuantizer> = Registry::new("quantizer");
    r.register(Arc::new(SomQuantizer::default()));
    r.register(Arc::new(MedianCut));
    r
}

pub fn saliency_models() -> Registry<dyn SaliencyModel> {
    let mut r: Registry<dyn SaliencyModel> = Registry::new("saliency");
    r.register(Arc::new(FrequencyTuned));
    r
}

pub fn color_metrics() -> Registry<dyn ColorMetric> {
    let mut r: Registry<dyn ColorMetric> = Registry::new("color metric");
    r.register(Arc::new(RgbEuclidean));
    r.register(Arc::new(CieLab76));
    r
}

pub fn transition_rules() -> Registry<dyn TransitionRule> {
    let mut r: Registry<dyn TransitionRule> = Registry::new("transition");
    r.register(Arc::new(BelowThreshold));
    r.register(Arc::new(SaliencyBand));
    r
}

/// The concrete strategies one pipeline run uses.
#[derive(Clone)]
pub struct Strategies {
    pub quantizer: Arc<dyn ColorQuantizer>,
    pub saliency: Arc<dyn SaliencyModel>,
    pub metric: Arc<dyn ColorMetric>,
    pub transition: Arc<dyn TransitionRule>,
}

impl Strategies {
    /// Resolve every strategy named in `params` against the built-in registries.
    pub fn from_params(params: &ScsParams) -> Result<Self> {
        Ok(Self {
            quantizer: quantizers().get(&params.quantizer)?,
            saliency: saliency_models().get(&params.saliency)?,
            metric: color_metrics().get(&params.color_metric)?,
            transition: transition_rules().get(&params.transition)?,
        })
    }
}

impl std::fmt::Debug for Strategies {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Strategies")
            .field("quantizer", &self.quantizer.name())
            .field("saliency", &self.saliency.name())
            .field("metric", &self.metric.name())
            .field("transition", &self.transition.name())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let s = Strategies::from_params(&ScsParams::default()).unwrap();
        assert_eq!(s.quantizer.name(), "som");
        assert_eq!(s.saliency.name(), "frequency-tuned");
        assert_eq!(s.transition.name(), "below-ts");
    }

    #[test]
    fn unknown_name_lists_alternatives() {
        let err = quantizers().get("octree").err().unwrap();
        let msg = err.to_string();
        assert!(msg.contains("octree") && msg.contains("som") && msg.contains("median-cut"), "{msg}");
    }

    #[test]
    fn registering_twice_replaces() {
        let mut r = quantizers();
        r.register(Arc::new(MedianCut));
        assert_eq!(r.names(), vec!["som", "median-cut"]);
    }

    #[test]
    fn metrics_are_selectable() {
        let lab = color_metrics().get("lab").unwrap();
        assert!(lab.distance([255.0; 3], [0.0; 3]) > 99.0);
    }
}
