//! The work behind each subcommand, usable without spawning the binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use scs_core::dataset::{load_image, load_mask, load_pair, save_image, save_mask, Manifest, SamplePair};
use scs_core::metrics::{aggregate, compute_metrics, confusion, Aggregate, Metric, MetricsReport};
use scs_core::phantom::corpus_phantom;
use scs_core::{LesionResult, ScsParams, Segmenter};

use crate::render::{boundary_thickness, render_boundary, render_overlay};

pub const CSV_HEADER: [&str; 12] = [
    "id", "ac", "se", "sp", "di", "ja", "p", "e", "hd", "xor", "low_confidence", "ms",
];

/// Identifier derived from a file name.
pub fn stem_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string())
}

/// Plain-text summary of one segmentation run.
pub fn format_report(id: &str, result: &LesionResult) -> String {
    let mut s = String::new();
    let full = &result.mask_full;
    let reduced = &result.mask_reduced;
    let _ = writeln!(s, "id: {id}");
    let _ = writeln!(s, "input: {}x{}", full.width(), full.height());
    let _ = writeln!(s, "working: {}x{}", reduced.width(), reduced.height());
    let _ = writeln!(s, "low_confidence: {}", result.low_confidence);
    let thresholds: Vec<String> = result.binarization.thresholds.iter().map(|t| format!("{t:.4}")).collect();
    let _ = writeln!(s, "binarization_thresholds: {}", thresholds.join(" "));
    let _ = writeln!(s, "hair_pixels: {}", result.preprocessed.hair.count());
    let _ = writeln!(s, "foreground_pixels: {}", full.count());
    for stage in &result.stages {
        let _ = writeln!(
            s,
            "stage {}: {:.3} ms{}",
            stage.stage.label(),
            stage.elapsed.as_secs_f64() * 1e3,
            if stage.skipped { " (skipped)" } else { "" }
        );
    }
    s
}

pub struct SegmentOutputs {
    pub mask: PathBuf,
    pub boundary: PathBuf,
    pub report: PathBuf,
}

/// Segment one image file and write its mask, boundary overlay and report.
///
/// Nothing is written unless the image decodes and segments.
pub fn segment_file(
    image_path: &Path,
    out_dir: &Path,
    id: Option<&str>,
    params: &ScsParams,
) -> Result<(LesionResult, SegmentOutputs)> {
    let image = load_image(image_path)?;
    let segmenter = Segmenter::new(params.clone())?;
    let result = segmenter.segment(&image)?;
    let boundary = render_boundary(
        &image,
        &result.mask_full,
        boundary_thickness(image.width(), image.height()),
    )?;
    let id = id.map(str::to_string).unwrap_or_else(|| stem_id(image_path));
    let report = format_report(&id, &result);

    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let outputs = SegmentOutputs {
        mask: out_dir.join(format!("{id}_mask.png")),
        boundary: out_dir.join(format!("{id}_boundary.png")),
        report: out_dir.join(format!("{id}_report.txt")),
    };
    let written = (|| -> Result<()> {
        save_mask(&result.mask_full, &outputs.mask)?;
        save_image(&boundary, &outputs.boundary)?;
        fs::write(&outputs.report, report)?;
        Ok(())
    })();
    if let Err(e) = written {
        for p in [&outputs.mask, &outputs.boundary, &outputs.report] {
            let _ = fs::remove_file(p);
        }
        return Err(e);
    }
    Ok((result, outputs))
}

/// One line of the batch results table.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchRow {
    pub id: String,
    pub metrics: Option<MetricsReport>,
    pub low_confidence: Option<bool>,
    pub ms: Option<u128>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub jobs: usize,
    /// Write `<id>_boundary.png` next to each mask.
    pub boundaries: bool,
    /// Write `<id>_overlay.png` (TP/FP/FN coloring) where ground truth exists.
    pub overlays: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            boundaries: false,
            overlays: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub rows: Vec<BatchRow>,
    pub aggregate: Option<Aggregate>,
    pub failures: usize,
}

fn process_pair(pair: &SamplePair, segmenter: &Segmenter, out_dir: &Path, opts: &BatchOptions) -> Result<BatchRow> {
    let start = Instant::now();
    let (image, gt) = load_pair(pair)?;
    let result = segmenter.segment(&image)?;
    let ms = start.elapsed().as_millis();
    save_mask(&result.mask_full, out_dir.join(format!("{}_mask.png", pair.id)))?;
    if opts.boundaries {
        let b = render_boundary(&image, &result.mask_full, boundary_thickness(image.width(), image.height()))?;
        save_image(&b, out_dir.join(format!("{}_boundary.png", pair.id)))?;
    }
    let metrics = match &gt {
        Some(gt) => {
            if opts.overlays {
                let o = render_overlay(&image, &result.mask_full, gt)?;
                save_image(&o, out_dir.join(format!("{}_overlay.png", pair.id)))?;
            }
            Some(compute_metrics(&confusion(&result.mask_full, gt)?))
        }
        None => None,
    };
    if result.low_confidence {
        log::warn!("{}: low confidence, fallback disk emitted", pair.id);
    }
    Ok(BatchRow {
        id: pair.id.clone(),
        metrics,
        low_confidence: Some(result.low_confidence),
        ms: Some(ms),
        error: None,
    })
}

/// Segment every pair of the manifest; rows come back in manifest order.
pub fn run_batch(manifest: &Manifest, out_dir: &Path, params: &ScsParams, opts: &BatchOptions) -> Result<BatchSummary> {
    let segmenter = Segmenter::new(params.clone())?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build()?;
    let rows: Vec<BatchRow> = pool.install(|| {
        manifest
            .pairs
            .par_iter()
            .map(|pair| {
                process_pair(pair, &segmenter, out_dir, opts).unwrap_or_else(|e| {
                    log::error!("{}: {e:#}", pair.id);
                    BatchRow {
                        id: pair.id.clone(),
                        metrics: None,
                        low_confidence: None,
                        ms: None,
                        error: Some(format!("{e:#}")),
                    }
                })
            })
            .collect()
    });
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    let reports: Vec<MetricsReport> = rows.iter().filter_map(|r| r.metrics.clone()).collect();
    let aggregate = if reports.is_empty() { None } else { Some(aggregate(&reports)?) };
    Ok(BatchSummary {
        rows,
        aggregate,
        failures,
    })
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6}")).unwrap_or_default()
}

/// Write the per-image table followed by a `mean` row.
pub fn write_csv<W: std::io::Write>(writer: W, summary: &BatchSummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for row in &summary.rows {
        let mut rec = vec![row.id.clone()];
        rec.extend(Metric::ALL.iter().map(|&m| fmt_value(row.metrics.as_ref().and_then(|r| r.get(m)))));
        rec.push(row.low_confidence.map(|b| b.to_string()).unwrap_or_default());
        rec.push(row.ms.map(|ms| ms.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    let mut mean = vec!["mean".to_string()];
    mean.extend(
        Metric::ALL
            .iter()
            .map(|&m| fmt_value(summary.aggregate.as_ref().and_then(|a| a.mean.get(m)))),
    );
    mean.push(String::new());
    mean.push(String::new());
    w.write_record(&mean)?;
    w.flush()?;
    Ok(())
}

/// Score a predicted mask file against a ground-truth mask file.
pub fn eval_files(pred: &Path, gt: &Path) -> Result<MetricsReport> {
    let pred = load_mask(pred)?;
    let gt = load_mask(gt)?;
    Ok(compute_metrics(&confusion(&pred, &gt)?))
}

/// `name=value` lines, `name=NA` for undefined metrics.
pub fn format_metrics(report: &MetricsReport) -> String {
    let mut s = String::new();
    for (name, value) in report.entries() {
        match value {
            Some(v) => {
                let _ = writeln!(s, "{name}={v:.6}");
            }
            None => {
                let _ = writeln!(s, "{name}=NA");
            }
        }
    }
    s
}

/// Write `count` phantoms as an ISIC-style tree plus `manifest.csv`.
pub fn gen_phantoms(count: usize, seed: u64, out_dir: &Path) -> Result<Vec<String>> {
    if count == 0 {
        bail!("count must be positive");
    }
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let ids: Vec<String> = (0..count).map(|i| format!("ISIC_{i:07}")).collect();
    ids.par_iter().enumerate().try_for_each(|(i, id)| -> Result<()> {
        let p = corpus_phantom(seed, i);
        save_image(&p.image, out_dir.join(format!("{id}.png")))?;
        save_mask(&p.truth, out_dir.join(format!("{id}_Segmentation.png")))?;
        Ok(())
    })?;
    let mut w = csv::Writer::from_path(out_dir.join("manifest.csv"))?;
    w.write_record(["id", "image", "gt"])?;
    for id in &ids {
        w.write_record([id.as_str(), &format!("{id}.png"), &format!("{id}_Segmentation.png")])?;
    }
    w.flush()?;
    Ok(ids)
}
