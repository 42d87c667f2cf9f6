//! Parameter overrides shared by the commands, and the `key = value` config file.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use scs_core::{Connectivity, KernelProximity, ScsParams};

/// Pipeline parameters; config-file keys are the flag names without the leading dashes.
#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// File of `key = value` lines applied before the flags below.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub maxdim: Option<usize>,
    #[arg(long)]
    pub colnum: Option<usize>,
    #[arg(long)]
    pub tc: Option<f64>,
    #[arg(long)]
    pub tn: Option<usize>,
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub ts: Option<f64>,
    #[arg(long)]
    pub theta2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Foreground connectivity, 4 or 8.
    #[arg(long)]
    pub connectivity: Option<u8>,
    /// `below` or `above`.
    #[arg(long)]
    pub kernel_proximity: Option<String>,
    #[arg(long)]
    pub quantizer: Option<String>,
    #[arg(long)]
    pub saliency: Option<String>,
    #[arg(long)]
    pub color_metric: Option<String>,
    #[arg(long)]
    pub transition: Option<String>,
    /// Keep the final component as is instead of its convex hull.
    #[arg(long)]
    pub no_hull: bool,
    /// Keep every final component instead of the largest one.
    #[arg(long)]
    pub multi_lesion: bool,
    #[arg(long)]
    pub no_hair: bool,
    /// Admit every low-saliency candidate regardless of its color.
    #[arg(long)]
    pub no_affinity: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow!("invalid value `{value}` for `{key}`: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("invalid value `{value}` for `{key}`: expected true or false"),
    }
}

/// Apply one named setting to `params`.
pub fn apply_setting(params: &mut ScsParams, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key {
        "maxdim" => params.maxdim = parse(key, value)?,
        "colnum" => params.colnum = parse(key, value)?,
        "tc" => params.tc = parse(key, value)?,
        "tn" => params.tn = parse(key, value)?,
        "theta1" => params.theta1 = parse(key, value)?,
        "ts" => params.ts = parse(key, value)?,
        "theta2" => params.theta2 = parse(key, value)?,
        "seed" => params.seed = parse(key, value)?,
        "max-iters" => params.max_binarize_iters = parse(key, value)?,
        "connectivity" => {
            params.connectivity = Connectivity::from_count(parse(key, value)?)
                .ok_or_else(|| anyhow!("invalid value `{value}` for `{key}`: expected 4 or 8"))?
        }
        "kernel-proximity" => {
            params.kernel_proximity = match value {
                "below" => KernelProximity::AreaBelowBridge,
                "above" => KernelProximity::AreaAboveBridge,
                _ => bail!("invalid value `{value}` for `{key}`: expected below or above"),
            }
        }
        "quantizer" => params.quantizer = value.to_string(),
        "saliency" => params.saliency = value.to_string(),
        "color-metric" => params.color_metric = value.to_string(),
        "transition" => params.transition = value.to_string(),
        "no-hull" => params.compute_hull = !parse_bool(key, value)?,
        "multi-lesion" => params.single_lesion = !parse_bool(key, value)?,
        "no-hair" => params.hair_removal = !parse_bool(key, value)?,
        "no-affinity" => params.foreground_affinity = !parse_bool(key, value)?,
        _ => bail!("unknown setting `{key}`"),
    }
    Ok(())
}

/// Parse `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`", n + 1))?;
        out.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path, params: &mut ScsParams) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for (key, value) in parse_config(&text).with_context(|| format!("in {}", path.display()))? {
        apply_setting(params, &key, &value).with_context(|| format!("in {}", path.display()))?;
    }
    Ok(())
}

impl ParamArgs {
    fn flag_settings(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        macro_rules! opt {
            ($field:ident, $key:literal) => {
                if let Some(v) = &self.$field {
                    out.push(($key, v.to_string()));
                }
            };
        }
        opt!(maxdim, "maxdim");
        opt!(colnum, "colnum");
        opt!(tc, "tc");
        opt!(tn, "tn");
        opt!(theta1, "theta1");
        opt!(ts, "ts");
        opt!(theta2, "theta2");
        opt!(seed, "seed");
        opt!(max_iters, "max-iters");
        opt!(connectivity, "connectivity");
        opt!(kernel_proximity, "kernel-proximity");
        opt!(quantizer, "quantizer");
        opt!(saliency, "saliency");
        opt!(color_metric, "color-metric");
        opt!(transition, "transition");
        for (set, key) in [
            (self.no_hull, "no-hull"),
            (self.multi_lesion, "multi-lesion"),
            (self.no_hair, "no-hair"),
            (self.no_affinity, "no-affinity"),
        ] {
            if set {
                out.push((key, "true".to_string()));
            }
        }
        out
    }

    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<ScsParams> {
        let mut params = ScsParams::default();
        if let Some(path) = &self.config {
            load_config(path, &mut params)?;
        }
        for (key, value) in self.flag_settings() {
            apply_setting(&mut params, key, &value)?;
        }
        params.validate()?;
        Ok(params)
    }
}
