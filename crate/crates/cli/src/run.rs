//! `sweep run`: build the design space, evaluate every feasible design and persist
//! the per-case tables the report is derived from.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Result};
use hullsweep::analysis::fatigue::FatigueSettings;
use hullsweep::analysis::stats::StatRow;
use hullsweep::hull::{solve_draft_for_c55, Design, DesignGrid, ShapeParams};
use hullsweep::sweep::{evaluate_design, DesignResult, Mode, SweepSettings};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::output::{write_csv, write_json};
use crate::{report, CliError, Status};

/// Run record read back by `report`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub seed: u64,
    pub fatigue: FatigueSettings,
    pub grid: DesignGrid,
    pub c55_target: f64,
    pub operational_cases: usize,
    pub operational_seeds: usize,
    pub time_designs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignSpaceRow {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub feasible: bool,
    pub draft: f64,
    pub column_radius: f64,
    pub plate_radius: f64,
    pub platform_mass_t: f64,
    pub ballast_mass_t: f64,
    pub system_cm: f64,
    pub metacentric_height: f64,
    pub c55: f64,
    pub cost: f64,
    pub error: String,
}

pub const DESIGN_SPACE_HEADER: [&str; 14] = [
    "design_id", "spacing", "plate_height", "feasible", "draft", "column_radius", "plate_radius",
    "platform_mass_t", "ballast_mass_t", "system_cm", "metacentric_height", "c55", "cost", "error",
];

pub const CASE_STATS_HEADER: [&str; 12] =
    ["design_id", "case_id", "source", "wind_speed", "hs", "tp", "weight", "signal", "mean", "std", "max", "del"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub design_id: String,
    pub case_id: String,
    pub wind_speed: f64,
    pub region: String,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub stability_margin: f64,
    pub kp: Option<f64>,
    pub ki: Option<f64>,
    pub omega_reg: Option<f64>,
    pub error: String,
}

const OUTCOME_HEADER: [&str; 12] = [
    "design_id", "case_id", "wind_speed", "region", "iterations", "converged", "residual",
    "stability_margin", "kp", "ki", "omega_reg", "error",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub wind_speed: f64,
    pub tp: f64,
    pub pitch_mode_hz: f64,
    pub tower_mode_hz: f64,
    pub system_cm: f64,
    pub wave_zcor_min: f64,
    pub wave_zcor_max: f64,
    pub phase_min: f64,
    pub phase_max: f64,
    pub umin_wave: f64,
    pub umin_wind: f64,
    pub umin_flagged: usize,
}

pub const DIAGNOSTICS_HEADER: [&str; 15] = [
    "design_id", "spacing", "plate_height", "wind_speed", "tp", "pitch_mode_hz", "tower_mode_hz",
    "system_cm", "wave_zcor_min", "wave_zcor_max", "phase_min", "phase_max", "umin_wave", "umin_wind",
    "umin_flagged",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CenterlineRow<'a> {
    design_id: &'a str,
    spacing: f64,
    plate_height: f64,
    set: &'static str,
    channel: &'static str,
    omega: f64,
    period: f64,
    z: f64,
    amplitude: f64,
    z_cor: f64,
    phase_difference: f64,
}

const CENTERLINE_HEADER: [&str; 11] = [
    "design_id", "spacing", "plate_height", "set", "channel", "omega", "period", "z", "amplitude", "z_cor",
    "phase_difference",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
struct UminRow<'a> {
    design_id: &'a str,
    spacing: f64,
    plate_height: f64,
    channel: &'static str,
    omega: f64,
    frequency_hz: f64,
    umin: f64,
    torque: f64,
    pitch: f64,
    conditioning: f64,
    flagged: bool,
}

const UMIN_HEADER: [&str; 11] = [
    "design_id", "spacing", "plate_height", "channel", "omega", "frequency_hz", "umin", "torque", "pitch",
    "conditioning", "flagged",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRow {
    pub design_id: String,
    pub message: String,
}

pub const FAILURE_HEADER: [&str; 2] = ["design_id", "message"];

/// One grid point: the design, or the reason it is infeasible.
pub fn design_space(settings: &SweepSettings) -> Result<Vec<(f64, f64, std::result::Result<Design, String>)>, CliError> {
    let basis = settings.resolved_basis().map_err(|e| CliError::Config(anyhow!(e)))?;
    Ok(settings
        .grid
        .points()
        .into_par_iter()
        .map(|(d, h)| {
            let r = ShapeParams::new(d, h)
                .and_then(|p| solve_draft_for_c55(p, basis.c55_target, &basis, &settings.turbine))
                .map_err(|e| e.to_string());
            (d, h, r)
        })
        .collect())
}

fn space_row(d: f64, h: f64, r: &std::result::Result<Design, String>) -> DesignSpaceRow {
    match r {
        Ok(x) => DesignSpaceRow {
            design_id: x.id.clone(),
            spacing: d,
            plate_height: h,
            feasible: true,
            draft: x.shape.draft,
            column_radius: x.shape.column_radius,
            plate_radius: x.shape.plate_radius,
            platform_mass_t: x.mass.platform().mass / 1e3,
            ballast_mass_t: x.mass.ballast.mass / 1e3,
            system_cm: x.mass.system().z_cm,
            metacentric_height: x.hydrostatics.metacentric_height,
            c55: x.hydrostatics.c55,
            cost: x.cost,
            error: String::new(),
        },
        Err(e) => DesignSpaceRow {
            design_id: format!("d{d:.1}_h{h:.1}"),
            spacing: d,
            plate_height: h,
            feasible: false,
            draft: f64::NAN,
            column_radius: f64::NAN,
            plate_radius: f64::NAN,
            platform_mass_t: f64::NAN,
            ballast_mass_t: f64::NAN,
            system_cm: f64::NAN,
            metacentric_height: f64::NAN,
            c55: f64::NAN,
            cost: f64::NAN,
            error: e.clone(),
        },
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Evaluate one design; errors and panics become a message.
pub fn evaluate_isolated(design: &Design, settings: &SweepSettings) -> std::result::Result<DesignResult, String> {
    match catch_unwind(AssertUnwindSafe(|| evaluate_design(design, settings, settings.mode))) {
        Ok(Ok(r)) => Ok(r),
        Ok(Err(e)) => Err(e.to_string()),
        Err(p) => Err(format!("panic: {}", panic_message(p))),
    }
}

#[derive(Serialize)]
struct FailedDesign<'a> {
    design: &'a Design,
    error: &'a str,
}

pub fn run(cfg: &RunConfig) -> Result<Status, CliError> {
    let settings = &cfg.settings;
    let out = cfg.output_dir.as_path();
    let start = Instant::now();
    let space = design_space(settings)?;
    let designs: Vec<&Design> = space.iter().filter_map(|(_, _, r)| r.as_ref().ok()).collect();
    eprintln!("{} grid points, {} feasible", space.len(), designs.len());
    let total = designs.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<(&Design, std::result::Result<DesignResult, String>)> = designs
        .par_iter()
        .map(|d| {
            let t = Instant::now();
            let r = evaluate_isolated(d, settings);
            let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            let note = match &r {
                Ok(x) if x.complete() => "ok".to_string(),
                Ok(x) => format!("{} failure(s)", x.failures.len()),
                Err(e) => format!("failed: {e}"),
            };
            eprintln!("[{k}/{total}] {} {note} ({:.1} s)", d.id, t.elapsed().as_secs_f64());
            (*d, r)
        })
        .collect();
    persist(out, settings, &space, &results).map_err(CliError::Io)?;
    eprintln!("sweep finished in {:.1} s", start.elapsed().as_secs_f64());
    let failed = results.iter().any(|(_, r)| r.as_ref().map(|x| !x.complete()).unwrap_or(true));
    let status = report::report(out)?;
    Ok(if failed || results.is_empty() { Status::Partial } else { status })
}

fn persist(
    out: &Path,
    settings: &SweepSettings,
    space: &[(f64, f64, std::result::Result<Design, String>)],
    results: &[(&Design, std::result::Result<DesignResult, String>)],
) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let record = RunRecord {
        mode: settings.mode,
        seed: settings.seed,
        fatigue: settings.fatigue,
        grid: settings.grid.clone(),
        c55_target: settings.basis.c55_target,
        operational_cases: settings.cases().len(),
        operational_seeds: settings.operational_seeds,
        time_designs: settings.time_designs.clone(),
    };
    write_json(&out.join("run.json"), "run", &record)?;
    let rows: Vec<DesignSpaceRow> = space.iter().map(|(d, h, r)| space_row(*d, *h, r)).collect();
    write_csv(&out.join("design_space.csv"), "design_space", &DESIGN_SPACE_HEADER, &rows)?;

    let mut stats: Vec<StatRow> = Vec::new();
    let mut outcomes = Vec::new();
    let mut diags = Vec::new();
    let mut failures = Vec::new();
    let mut centerline = Vec::new();
    let mut umin = Vec::new();
    for (design, r) in results {
        let id = design.id.as_str();
        let (d, h) = (design.shape.spacing(), design.shape.plate_height());
        let res = match r {
            Ok(x) => x,
            Err(e) => {
                failures.push(FailureRow { design_id: id.into(), message: e.clone() });
                write_json(&out.join("designs").join(format!("{id}.json")), "design_result", &FailedDesign { design, error: e })?;
                continue;
            }
        };
        write_json(&out.join("designs").join(format!("{id}.json")), "design_result", res)?;
        if let Some(g) = &res.gains {
            write_json(&out.join("gains").join(format!("{id}.json")), "gains", g)?;
        }
        for m in &res.failures {
            failures.push(FailureRow { design_id: id.into(), message: m.clone() });
        }
        for c in res.freq_cases.iter().chain(&res.time_cases) {
            stats.extend(c.rows());
        }
        for o in &res.outcomes {
            outcomes.push(OutcomeRow {
                design_id: id.into(),
                case_id: o.case_id.clone(),
                wind_speed: o.wind_speed,
                region: o.region.map(|r| format!("{r:?}")).unwrap_or_default(),
                iterations: o.iterations,
                converged: o.converged,
                residual: o.residual,
                stability_margin: o.stability_margin,
                kp: o.gains.map(|g| g.kp),
                ki: o.gains.map(|g| g.ki),
                omega_reg: o.gains.map(|g| g.omega_reg),
                error: o.error.clone().unwrap_or_default(),
            });
        }
        if let Some(x) = &res.diagnostics {
            diags.push(DiagnosticsRow {
                design_id: id.into(),
                spacing: d,
                plate_height: h,
                wind_speed: x.wind_speed,
                tp: x.tp,
                pitch_mode_hz: x.pitch_mode_hz,
                tower_mode_hz: x.tower_mode_hz,
                system_cm: x.system_cm,
                wave_zcor_min: x.wave_zcor_band.0,
                wave_zcor_max: x.wave_zcor_band.1,
                phase_min: x.phase_band.0,
                phase_max: x.phase_band.1,
                umin_wave: x.umin_wave,
                umin_wind: x.umin_wind,
                umin_flagged: x.umin_flagged,
            });
        }
        // the diagnostics pass stores periods, wind periods, then the 7-10 s wave band
        for (cl, set) in res.centerline.iter().zip(["wave", "wind", "wave_band"]) {
            for (i, w) in cl.omega.iter().enumerate() {
                for (j, z) in cl.z.iter().enumerate() {
                    centerline.push(CenterlineRow {
                        design_id: id,
                        spacing: d,
                        plate_height: h,
                        set,
                        channel: cl.channel.label(),
                        omega: *w,
                        period: 2.0 * std::f64::consts::PI / w,
                        z: *z,
                        amplitude: cl.amplitude[i][j],
                        z_cor: cl.z_cor[i],
                        phase_difference: cl.phase_difference[i],
                    });
                }
            }
        }
        for u in &res.umin {
            for i in 0..u.omega.len() {
                umin.push(UminRow {
                    design_id: id,
                    spacing: d,
                    plate_height: h,
                    channel: u.channel.label(),
                    omega: u.omega[i],
                    frequency_hz: u.omega[i] / (2.0 * std::f64::consts::PI),
                    umin: u.umin[i],
                    torque: u.inputs[i][0],
                    pitch: u.inputs[i][1],
                    conditioning: u.conditioning[i],
                    flagged: u.flagged[i],
                });
            }
        }
    }
    write_csv(&out.join("case_stats.csv"), "case_stats", &CASE_STATS_HEADER, &stats)?;
    write_csv(&out.join("case_outcomes.csv"), "case_outcomes", &OUTCOME_HEADER, &outcomes)?;
    write_csv(&out.join("diagnostics.csv"), "diagnostics", &DIAGNOSTICS_HEADER, &diags)?;
    write_csv(&out.join("failures.csv"), "failures", &FAILURE_HEADER, &failures)?;
    write_csv(&out.join("centerline.csv"), "centerline", &CENTERLINE_HEADER, &centerline)?;
    write_csv(&out.join("umin.csv"), "umin", &UMIN_HEADER, &umin)?;
    Ok(())
}
