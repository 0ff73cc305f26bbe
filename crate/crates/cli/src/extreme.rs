//! `sweep extreme`: parked-rotor extreme runs for the designs at the configured
//! heave-plate height.

use anyhow::anyhow;
use hullsweep::hull::GRAVITY;
use hullsweep::sweep::{evaluate_extreme, ExtremeResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::{write_csv, write_json};
use crate::run::design_space;
use crate::{report, CliError, Status};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremeRow {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    /// Seeds joined with `;`.
    pub seeds: String,
    pub mean_max_tower_moment: f64,
    pub mean_max_acceleration: f64,
    pub mean_max_acceleration_g: f64,
    pub error: String,
}

const EXTREME_HEADER: [&str; 8] = [
    "design_id", "spacing", "plate_height", "seeds", "mean_max_tower_moment", "mean_max_acceleration",
    "mean_max_acceleration_g", "error",
];

fn row(r: &ExtremeResult) -> ExtremeRow {
    ExtremeRow {
        design_id: r.design_id.clone(),
        spacing: r.spacing,
        plate_height: r.plate_height,
        seeds: r.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(";"),
        mean_max_tower_moment: r.mean_max_tower_moment,
        mean_max_acceleration: r.mean_max_acceleration,
        mean_max_acceleration_g: r.mean_max_acceleration / GRAVITY,
        error: String::new(),
    }
}

pub fn extreme(cfg: &RunConfig) -> Result<Status, CliError> {
    let settings = &cfg.settings;
    let out = cfg.output_dir.as_path();
    let h = settings.extreme_plate_height;
    let space = design_space(settings)?;
    let designs: Vec<_> = space
        .iter()
        .filter(|(_, ph, _)| (ph - h).abs() < 1e-9)
        .filter_map(|(_, _, r)| r.as_ref().ok())
        .collect();
    eprintln!("{} designs at h_hp = {h} m", designs.len());
    let results: Vec<(ExtremeRow, Option<ExtremeResult>)> = designs
        .par_iter()
        .map(|d| match evaluate_extreme(d, settings) {
            Ok((r, _)) => {
                eprintln!("{}: {:.3} g", d.id, r.mean_max_acceleration / GRAVITY);
                (row(&r), Some(r))
            }
            Err(e) => {
                eprintln!("{}: failed: {e}", d.id);
                let r = ExtremeRow {
                    design_id: d.id.clone(),
                    spacing: d.shape.spacing(),
                    plate_height: d.shape.plate_height(),
                    seeds: String::new(),
                    mean_max_tower_moment: f64::NAN,
                    mean_max_acceleration: f64::NAN,
                    mean_max_acceleration_g: f64::NAN,
                    error: e.to_string(),
                };
                (r, None)
            }
        })
        .collect();
    let rows: Vec<ExtremeRow> = results.iter().map(|r| r.0.clone()).collect();
    let full: Vec<&ExtremeResult> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    write_csv(&out.join("extreme.csv"), "extreme", &EXTREME_HEADER, &rows).map_err(CliError::Io)?;
    write_json(&out.join("extreme.json"), "extreme", &serde_json::json!({ "designs": full })).map_err(CliError::Io)?;
    if out.join("run.json").exists() {
        report::report(out)?;
    }
    if rows.is_empty() {
        return Err(CliError::Partial(anyhow!("no feasible design at h_hp = {h} m")));
    }
    Ok(if full.len() == rows.len() { Status::Success } else { Status::Partial })
}
