//! `sweep report`: weighted statistics, ranking and summary recomputed from the
//! per-case tables of a run directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::anyhow;
use hullsweep::analysis::stats::{weight_statistics, CaseStatistics, DesignStatistics, Source, StatRow};
use hullsweep::sweep::Mode;
use serde::{Deserialize, Serialize};

use crate::extreme::ExtremeRow;
use crate::output::{read_csv, read_json, schema, write_atomic, write_csv, write_json};
use crate::run::{DesignSpaceRow, DiagnosticsRow, FailureRow, RunRecord};
use crate::{CliError, Status};

/// Ranking objective.
pub const OBJECTIVE: &str = "tower_base_moment";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankedRow {
    pub rank: Option<usize>,
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub draft: f64,
    pub cost: f64,
    pub platform_mass_t: f64,
    pub source: String,
    pub del_tower_base_moment: Option<f64>,
    pub std_rotor_speed: Option<f64>,
    pub std_platform_pitch: Option<f64>,
    pub std_blade_pitch: Option<f64>,
    pub std_power: Option<f64>,
    pub umin_wave: Option<f64>,
    pub umin_wind: Option<f64>,
    pub wave_zcor_min: Option<f64>,
    pub wave_zcor_max: Option<f64>,
    pub extreme_tower_moment: Option<f64>,
    pub extreme_acceleration_g: Option<f64>,
    pub status: String,
}

const RANKED_HEADER: [&str; 20] = [
    "rank", "design_id", "spacing", "plate_height", "draft", "cost", "platform_mass_t", "source",
    "del_tower_base_moment", "std_rotor_speed", "std_platform_pitch", "std_blade_pitch", "std_power",
    "umin_wave", "umin_wind", "wave_zcor_min", "wave_zcor_max", "extreme_tower_moment",
    "extreme_acceleration_g", "status",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedRow {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub source: Source,
    pub cases: usize,
    pub signal: String,
    pub mean: f64,
    pub std: f64,
    pub max: f64,
    pub del: f64,
}

const WEIGHTED_HEADER: [&str; 10] =
    ["design_id", "spacing", "plate_height", "source", "cases", "signal", "mean", "std", "max", "del"];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Best {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub del: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub objective: String,
    pub source: Source,
    pub grid_points: usize,
    pub feasible: usize,
    pub ranked: usize,
    pub with_failures: usize,
    pub best: Option<Best>,
    /// `(max - min) / min` of the objective over ranked designs.
    pub spread: Option<f64>,
    pub best_per_plate_height: Vec<Best>,
}

fn primary(mode: Mode) -> Source {
    match mode {
        Mode::Time => Source::Time,
        Mode::Freq | Mode::Both => Source::Freq,
    }
}

fn source_label(s: Source) -> &'static str {
    match s {
        Source::Freq => "freq",
        Source::Time => "time",
    }
}

fn optional<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    if path.exists() {
        read_csv(path).map_err(CliError::Io)
    } else {
        Ok(Vec::new())
    }
}

/// Weighted statistics per `(design, source)`, in key order.
pub fn aggregate(rows: &[StatRow], run: &RunRecord) -> Result<BTreeMap<(String, &'static str), DesignStatistics>, CliError> {
    let mut groups: BTreeMap<(String, &'static str), Vec<CaseStatistics>> = BTreeMap::new();
    for c in CaseStatistics::from_rows(rows) {
        groups.entry((c.design_id.clone(), source_label(c.source))).or_default().push(c);
    }
    groups
        .into_iter()
        .map(|(k, cs)| {
            weight_statistics(&cs, &run.fatigue)
                .map(|s| (k, s))
                .map_err(|e| CliError::Io(anyhow!(e)))
        })
        .collect()
}

pub fn report(dir: &Path) -> Result<Status, CliError> {
    let run_path = dir.join("run.json");
    if !run_path.exists() {
        return Err(CliError::Config(anyhow!("{} is not a sweep output directory (no run.json)", dir.display())));
    }
    let run: RunRecord = read_json(&run_path).map_err(CliError::Config)?;
    let space: Vec<DesignSpaceRow> = read_csv(&dir.join("design_space.csv")).map_err(CliError::Io)?;
    let rows: Vec<StatRow> = optional(&dir.join("case_stats.csv"))?;
    let diags: Vec<DiagnosticsRow> = optional(&dir.join("diagnostics.csv"))?;
    let failures: Vec<FailureRow> = optional(&dir.join("failures.csv"))?;
    let extremes: Vec<ExtremeRow> = optional(&dir.join("extreme.csv"))?;

    let weighted = aggregate(&rows, &run)?;
    let src = primary(run.mode);
    let failed: BTreeSet<&str> = failures.iter().map(|f| f.design_id.as_str()).collect();
    let diag: BTreeMap<&str, &DiagnosticsRow> = diags.iter().map(|d| (d.design_id.as_str(), d)).collect();
    let ext: BTreeMap<&str, &ExtremeRow> =
        extremes.iter().filter(|e| e.error.is_empty()).map(|e| (e.design_id.as_str(), e)).collect();
    let expected = run.operational_cases;

    let mut ranked = Vec::new();
    for s in space.iter().filter(|s| s.feasible) {
        let id = s.design_id.as_str();
        let w = weighted.get(&(s.design_id.clone(), source_label(src)));
        let get = |name: &str, f: fn(&hullsweep::analysis::stats::WeightedSignal) -> f64| {
            w.and_then(|w| w.signals.get(name)).map(f)
        };
        let complete = w.map(|w| w.cases == expected).unwrap_or(false) && !failed.contains(id);
        let status = if complete {
            "ok"
        } else if failed.contains(id) {
            "failed"
        } else {
            "incomplete"
        };
        let d = diag.get(id);
        let e = ext.get(id);
        ranked.push(RankedRow {
            rank: None,
            design_id: s.design_id.clone(),
            spacing: s.spacing,
            plate_height: s.plate_height,
            draft: s.draft,
            cost: s.cost,
            platform_mass_t: s.platform_mass_t,
            source: source_label(src).into(),
            del_tower_base_moment: get(OBJECTIVE, |x| x.del),
            std_rotor_speed: get("rotor_speed", |x| x.std),
            std_platform_pitch: get("platform_pitch", |x| x.std),
            std_blade_pitch: get("blade_pitch", |x| x.std),
            std_power: get("power", |x| x.std),
            umin_wave: d.map(|d| d.umin_wave),
            umin_wind: d.map(|d| d.umin_wind),
            wave_zcor_min: d.map(|d| d.wave_zcor_min),
            wave_zcor_max: d.map(|d| d.wave_zcor_max),
            extreme_tower_moment: e.map(|e| e.mean_max_tower_moment),
            extreme_acceleration_g: e.map(|e| e.mean_max_acceleration_g),
            status: status.into(),
        });
    }
    // complete rows by objective, ties by id; the rest keep grid order
    let key = |r: &RankedRow| (r.status != "ok", if r.status == "ok" { r.del_tower_base_moment } else { None });
    ranked.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0)
            .then_with(|| ka.1.unwrap_or(0.0).total_cmp(&kb.1.unwrap_or(0.0)))
            .then_with(|| if ka.0 { std::cmp::Ordering::Equal } else { a.design_id.cmp(&b.design_id) })
    });
    let mut n = 0;
    for r in ranked.iter_mut().filter(|r| r.status == "ok") {
        n += 1;
        r.rank = Some(n);
    }
    write_csv(&dir.join("ranked.csv"), "ranked", &RANKED_HEADER, &ranked).map_err(CliError::Io)?;

    let coords: BTreeMap<&str, (f64, f64)> = space.iter().map(|s| (s.design_id.as_str(), (s.spacing, s.plate_height))).collect();
    let mut wrows = Vec::new();
    for s in space.iter().filter(|s| s.feasible) {
        for label in ["freq", "time"] {
            if let Some(w) = weighted.get(&(s.design_id.clone(), label)) {
                let (d, h) = coords[s.design_id.as_str()];
                for (name, x) in &w.signals {
                    wrows.push(WeightedRow {
                        design_id: s.design_id.clone(),
                        spacing: d,
                        plate_height: h,
                        source: w.source,
                        cases: w.cases,
                        signal: name.clone(),
                        mean: x.mean,
                        std: x.std,
                        max: x.max,
                        del: x.del,
                    });
                }
            }
        }
    }
    write_csv(&dir.join("weighted_stats.csv"), "weighted_stats", &WEIGHTED_HEADER, &wrows).map_err(CliError::Io)?;

    let ok: Vec<&RankedRow> = ranked.iter().filter(|r| r.rank.is_some()).collect();
    let best_of = |rs: &[&RankedRow]| {
        rs.first().map(|r| Best {
            design_id: r.design_id.clone(),
            spacing: r.spacing,
            plate_height: r.plate_height,
            del: r.del_tower_base_moment.unwrap_or(f64::NAN),
        })
    };
    let mut heights: Vec<f64> = ok.iter().map(|r| r.plate_height).collect();
    heights.sort_by(f64::total_cmp);
    heights.dedup();
    let per_height: Vec<Best> = heights
        .iter()
        .filter_map(|h| best_of(&ok.iter().copied().filter(|r| r.plate_height == *h).collect::<Vec<_>>()))
        .collect();
    let spread = match (ok.first(), ok.last()) {
        (Some(lo), Some(hi)) if ok.len() > 1 => {
            let (lo, hi) = (lo.del_tower_base_moment.unwrap_or(f64::NAN), hi.del_tower_base_moment.unwrap_or(f64::NAN));
            Some((hi - lo) / lo)
        }
        _ => None,
    };
    let summary = Summary {
        objective: format!("weighted {OBJECTIVE} DEL"),
        source: src,
        grid_points: space.len(),
        feasible: space.iter().filter(|s| s.feasible).count(),
        ranked: ok.len(),
        with_failures: failed.len(),
        best: best_of(&ok),
        spread,
        best_per_plate_height: per_height,
    };
    write_json(&dir.join("summary.json"), "summary", &summary).map_err(CliError::Io)?;
    write_atomic(&dir.join("summary.txt"), summary_text(&summary).as_bytes()).map_err(CliError::Io)?;
    Ok(if summary.ranked == 0 || summary.with_failures > 0 || summary.ranked < summary.feasible {
        Status::Partial
    } else {
        Status::Success
    })
}

pub fn summary_text(s: &Summary) -> String {
    let mut t = format!("# schema: {}\n", schema("summary"));
    t.push_str(&format!(
        "designs: {} grid points, {} feasible, {} ranked, {} with failures\n",
        s.grid_points, s.feasible, s.ranked, s.with_failures
    ));
    match &s.best {
        Some(b) => t.push_str(&format!(
            "minimum {} ({}): {} (d = {} m, h_hp = {} m), {:.4e} N m\n",
            s.objective,
            source_label(s.source),
            b.design_id,
            b.spacing,
            b.plate_height,
            b.del
        )),
        None => t.push_str("no ranked designs\n"),
    }
    if let Some(x) = s.spread {
        t.push_str(&format!("spread over ranked designs: {:.1} %\n", 100.0 * x));
    }
    for b in &s.best_per_plate_height {
        t.push_str(&format!("  h_hp = {} m: {} ({:.4e} N m)\n", b.plate_height, b.design_id, b.del));
    }
    t
}
