//! Command-line front end: single-image segmentation, batch evaluation over a
//! dataset tree, mask scoring and synthetic corpus generation.

pub mod commands;
pub mod render;
pub mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use scs_core::dataset::{discover, Layout};
use scs_core::registry;

use commands::{eval_files, format_metrics, gen_phantoms, run_batch, segment_file, write_csv, BatchOptions};
use settings::ParamArgs;

#[derive(Parser, Debug)]
#[command(name = "scs", version, about = "Saliency and color based skin lesion segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Segment one image.
    Segment(SegmentArgs),
    /// Segment and score every image of a dataset tree.
    Batch(BatchArgs),
    /// Score a predicted mask against a ground-truth mask.
    Eval(EvalArgs),
    /// Write a synthetic corpus with ground truth.
    GenPhantoms(GenArgs),
    /// List the registered strategies.
    Strategies,
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    pub image: PathBuf,
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
    /// Output file prefix; defaults to the image file stem.
    #[arg(long)]
    pub id: Option<String>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    pub root: PathBuf,
    #[arg(long, default_value = "isic")]
    pub layout: Layout,
    #[arg(long, short, default_value = "scs-out")]
    pub out: PathBuf,
    /// Results table path; defaults to `results.csv` in the output directory.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, short, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub boundaries: bool,
    #[arg(long)]
    pub overlay: bool,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub pred: PathBuf,
    pub gt: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

fn cmd_segment(args: &SegmentArgs) -> Result<()> {
    let params = args.params.resolve()?;
    let (result, outputs) = segment_file(&args.image, &args.out, args.id.as_deref(), &params)?;
    if result.low_confidence {
        eprintln!("warning: no lesion signal found; emitted a centered fallback disk");
    }
    println!("{}", outputs.mask.display());
    println!("{}", outputs.boundary.display());
    println!("{}", outputs.report.display());
    Ok(())
}

fn cmd_batch(args: &BatchArgs) -> Result<()> {
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let params = args.params.resolve()?;
    let manifest = discover(&args.root, args.layout)?;
    let opts = BatchOptions {
        jobs: args.jobs,
        boundaries: args.boundaries,
        overlays: args.overlay,
    };
    let summary = run_batch(&manifest, &args.out, &params, &opts)?;
    let report = args.report.clone().unwrap_or_else(|| args.out.join("results.csv"));
    write_csv(std::fs::File::create(&report)?, &summary)?;
    let low = summary.rows.iter().filter(|r| r.low_confidence == Some(true)).count();
    eprintln!(
        "{} images, {} failed, {} low confidence; table at {}",
        summary.rows.len(),
        summary.failures,
        low,
        report.display()
    );
    if summary.failures == summary.rows.len() {
        bail!("every image failed");
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    print!("{}", format_metrics(&eval_files(&args.pred, &args.gt)?));
    Ok(())
}

fn cmd_strategies() {
    println!("{}: {}", registry::quantizers().kind(), registry::quantizers().names().join(", "));
    println!("{}: {}", registry::saliency_models().kind(), registry::saliency_models().names().join(", "));
    println!("{}: {}", registry::color_metrics().kind(), registry::color_metrics().names().join(", "));
    println!("{}: {}", registry::transition_rules().kind(), registry::transition_rules().names().join(", "));
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Segment(a) => cmd_segment(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Eval(a) => cmd_eval(a),
        Command::GenPhantoms(a) => {
            let ids = gen_phantoms(a.count, a.seed, &a.out)?;
            eprintln!("wrote {} phantoms to {}", ids.len(), a.out.display());
            Ok(())
        }
        Command::Strategies => {
            cmd_strategies();
            Ok(())
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
