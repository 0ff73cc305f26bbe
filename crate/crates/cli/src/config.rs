//! Configuration file loading and command-line overrides.
//!
//! The file is TOML. Top-level keys are the fields of `SweepSettings` plus an
//! optional `output_dir`; every key may be omitted. Unknown keys are rejected so
//! that typos do not silently fall back to defaults.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hullsweep::hull::DesignGrid;
use hullsweep::sweep::{Mode, SweepSettings};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub settings: SweepSettings,
    pub output_dir: PathBuf,
}

/// Command-line values that replace file settings.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub designs: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "sweep-out";

pub fn parse(text: &str) -> Result<RunConfig> {
    let mut table: toml::Table = toml::from_str(text).context("malformed TOML")?;
    let output_dir = match table.remove("output_dir") {
        None => PathBuf::from(DEFAULT_OUTPUT_DIR),
        Some(toml::Value::String(s)) => PathBuf::from(s),
        Some(v) => bail!("output_dir must be a string, got {}", v.type_str()),
    };
    let reference = toml::Table::try_from(SweepSettings::default()).context("serializing defaults")?;
    let mut unknown = Vec::new();
    unknown_keys(&table, &reference, "", &mut unknown);
    if !unknown.is_empty() {
        bail!("unknown configuration keys: {}", unknown.join(", "));
    }
    let settings: SweepSettings = toml::Value::Table(table).try_into().context("invalid configuration value")?;
    Ok(RunConfig { settings, output_dir })
}

pub fn load(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

fn unknown_keys(user: &toml::Table, reference: &toml::Table, prefix: &str, out: &mut Vec<String>) {
    for (k, v) in user {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match (reference.get(k), v) {
            (None, _) => out.push(path),
            (Some(toml::Value::Table(r)), toml::Value::Table(u)) => unknown_keys(u, r, &path, out),
            _ => {}
        }
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = o.mode {
            self.settings.mode = m;
        }
        if let Some(s) = o.seed {
            self.settings.seed = s;
        }
        if let Some(d) = &o.out {
            self.output_dir = d.clone();
        }
        apply_designs(&mut self.settings.grid, &o.designs)?;
        self.settings.validate().map_err(|e| anyhow!(e))?;
        Ok(())
    }
}

/// Applies `d=<list>` and `hhp=<list>` tokens, where a list is `a..b[:step]` or
/// comma-separated values.
pub fn apply_designs(grid: &mut DesignGrid, tokens: &[String]) -> Result<()> {
    for t in tokens {
        let (key, spec) = t.split_once('=').ok_or_else(|| anyhow!("design token {t:?} is not key=values"))?;
        let values = parse_values(spec).with_context(|| format!("design token {t:?}"))?;
        match key.trim() {
            "d" | "spacing" => grid.spacings = values,
            "hhp" | "h" | "plate_height" => grid.plate_heights = values,
            k => bail!("unknown design key {k:?}, expected d or hhp"),
        }
    }
    Ok(())
}

fn number(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("{s:?} is not a number"))?;
    if !v.is_finite() || v <= 0.0 {
        bail!("{s:?} must be a positive number");
    }
    Ok(v)
}

pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    if let Some((lo, rest)) = spec.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, s)) => (h, number(s)?),
            None => (rest, 1.0),
        };
        let (lo, hi) = (number(lo)?, number(hi)?);
        if hi < lo {
            bail!("empty range {lo}..{hi}");
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        // round away accumulated step error so ids stay stable
        return Ok((0..=n).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect());
    }
    let v = spec.split(',').map(number).collect::<Result<Vec<f64>>>()?;
    if v.is_empty() {
        bail!("no values");
    }
    Ok(v)
}
