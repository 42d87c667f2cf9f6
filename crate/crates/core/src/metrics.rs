//! Pixel-wise evaluation of a predicted mask against ground truth.

use crate::error::{Error, Result};
use crate::raster::{check_grid, BinaryMask};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<ConfusionCounts> {
    check_grid(pred, gt)?;
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Identifies one of the nine reported measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Accuracy,
    Sensitivity,
    Specificity,
    Dice,
    Jaccard,
    Precision,
    Error,
    Hammoude,
    Xor,
}

impl Metric {
    /// Report order.
    pub const ALL: [Metric; 9] = [
        Metric::Accuracy,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Dice,
        Metric::Jaccard,
        Metric::Precision,
        Metric::Error,
        Metric::Hammoude,
        Metric::Xor,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::Accuracy => "ac",
            Metric::Sensitivity => "se",
            Metric::Specificity => "sp",
            Metric::Dice => "di",
            Metric::Jaccard => "ja",
            Metric::Precision => "p",
            Metric::Error => "e",
            Metric::Hammoude => "hd",
            Metric::Xor => "xor",
        }
    }
}

/// The nine measures; `None` marks a zero denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub ac: Option<f64>,
    pub se: Option<f64>,
    pub sp: Option<f64>,
    pub di: Option<f64>,
    pub ja: Option<f64>,
    pub p: Option<f64>,
    pub e: Option<f64>,
    pub hd: Option<f64>,
    pub xor: Option<f64>,
}

impl MetricsReport {
    pub fn get(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Accuracy => self.ac,
            Metric::Sensitivity => self.se,
            Metric::Specificity => self.sp,
            Metric::Dice => self.di,
            Metric::Jaccard => self.ja,
            Metric::Precision => self.p,
            Metric::Error => self.e,
            Metric::Hammoude => self.hd,
            Metric::Xor => self.xor,
        }
    }

    fn slot(&mut self, m: Metric) -> &mut Option<f64> {
        match m {
            Metric::Accuracy => &mut self.ac,
            Metric::Sensitivity => &mut self.se,
            Metric::Specificity => &mut self.sp,
            Metric::Dice => &mut self.di,
            Metric::Jaccard => &mut self.ja,
            Metric::Precision => &mut self.p,
            Metric::Error => &mut self.e,
            Metric::Hammoude => &mut self.hd,
            Metric::Xor => &mut self.xor,
        }
    }

    pub fn is_defined(&self, m: Metric) -> bool {
        self.get(m).is_some()
    }

    /// `(key, value)` pairs in report order.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, Option<f64>)> + '_ {
        Metric::ALL.iter().map(|&m| (m.key(), self.get(m)))
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn compute_metrics(c: &ConfusionCounts) -> MetricsReport {
    let ConfusionCounts { tp, fp, tn, fn_ } = *c;
    let total = c.total();
    MetricsReport {
        ac: ratio(tp + tn, total),
        se: ratio(tp, tp + fn_),
        sp: ratio(tn, tn + fp),
        di: ratio(2 * tp, 2 * tp + fn_ + fp),
        ja: ratio(tp, tp + fn_ + fp),
        p: ratio(tp, tp + fp),
        e: ratio(fp + fn_, total),
        hd: ratio(fp + fn_, tp + fn_ + fp),
        xor: ratio(fp + fn_, tp + fn_),
    }
}

/// Dataset mean; undefined entries are skipped per metric.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Aggregate {
    pub mean: MetricsReport,
    /// Number of reports whose value was undefined, per metric in report order.
    pub skipped: [usize; 9],
    pub count: usize,
}

impl Aggregate {
    pub fn skipped_for(&self, m: Metric) -> usize {
        let i = Metric::ALL.iter().position(|&x| x == m).expect("listed metric");
        self.skipped[i]
    }
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<Aggregate> {
    if reports.is_empty() {
        return Err(Error::InvalidInput("cannot aggregate zero reports".into()));
    }
    let mut out = Aggregate {
        count: reports.len(),
        ..Aggregate::default()
    };
    for (i, &m) in Metric::ALL.iter().enumerate() {
        let defined: Vec<f64> = reports.iter().filter_map(|r| r.get(m)).collect();
        out.skipped[i] = reports.len() - defined.len();
        *out.mean.slot(m) = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Option<f64>, b: f64) -> bool {
        a.is_some_and(|a| (a - b).abs() < 1e-4)
    }

    #[test]
    fn confusion_examples() {
        let gt = BinaryMask::from_fn(10, 10, |r, _| r < 4);
        assert_eq!(confusion(&gt, &gt).unwrap(), ConfusionCounts::new(40, 0, 60, 0));
        let c = confusion(&gt.complement(), &gt).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));

        let gt = BinaryMask::from_fn(10, 10, |_, c| c < 5);
        let pred = BinaryMask::from_fn(10, 10, |r, _| r < 5);
        assert_eq!(confusion(&pred, &gt).unwrap(), ConfusionCounts::new(25, 25, 25, 25));
        assert!(confusion(&pred, &BinaryMask::empty(10, 9)).is_err());
    }

    #[test]
    fn perfect_and_hand_values() {
        let r = compute_metrics(&ConfusionCounts::new(40, 0, 60, 0));
        for m in [Metric::Accuracy, Metric::Sensitivity, Metric::Specificity, Metric::Dice, Metric::Jaccard, Metric::Precision] {
            assert_eq!(r.get(m), Some(1.0));
        }
        for m in [Metric::Error, Metric::Hammoude, Metric::Xor] {
            assert_eq!(r.get(m), Some(0.0));
        }

        let r = compute_metrics(&ConfusionCounts::new(40, 10, 30, 20));
        assert!(close(r.ac, 0.70));
        assert!(close(r.se, 0.6667));
        assert!(close(r.sp, 0.75));
        assert!(close(r.di, 0.7273));
        assert!(close(r.ja, 0.5714));
        assert!(close(r.p, 0.80));
        assert!(close(r.e, 0.30));
        assert!(close(r.hd, 0.4286));
        assert!(close(r.xor, 0.50));
    }

    #[test]
    fn empty_ground_truth_flags_undefined() {
        let r = compute_metrics(&ConfusionCounts::new(0, 0, 100, 0));
        for m in [Metric::Sensitivity, Metric::Dice, Metric::Jaccard, Metric::Precision, Metric::Hammoude, Metric::Xor] {
            assert!(!r.is_defined(m), "{m:?}");
        }
        assert_eq!((r.ac, r.sp, r.e), (Some(1.0), Some(1.0), Some(0.0)));
    }

    #[test]
    fn aggregation() {
        let a = compute_metrics(&ConfusionCounts::new(40, 10, 30, 20));
        assert_eq!(aggregate(&[a]).unwrap().mean, a);

        let mk = |di| MetricsReport { di: Some(di), ..MetricsReport::default() };
        let agg = aggregate(&[mk(0.8), mk(0.9)]).unwrap();
        assert!((agg.mean.di.unwrap() - 0.85).abs() < 1e-12);

        let ja = |v: Option<f64>| MetricsReport { ja: v, ..MetricsReport::default() };
        let agg = aggregate(&[ja(Some(0.5)), ja(None), ja(Some(0.7))]).unwrap();
        assert!((agg.mean.ja.unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(agg.skipped_for(Metric::Jaccard), 1);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn swapping_roles_swaps_sensitivity_and_precision() {
        let a = BinaryMask::from_fn(12, 12, |r, c| r + c < 12);
        let b = BinaryMask::from_fn(12, 12, |r, c| r < 7 && c > 1);
        let ab = compute_metrics(&confusion(&a, &b).unwrap());
        let ba = compute_metrics(&confusion(&b, &a).unwrap());
        assert_eq!(ab.se, ba.p);
        assert_eq!(ab.p, ba.se);
        for m in [Metric::Dice, Metric::Jaccard, Metric::Accuracy, Metric::Error, Metric::Hammoude] {
            assert_eq!(ab.get(m), ba.get(m));
        }
    }
}
