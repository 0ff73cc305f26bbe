//! Per-design evaluation pipeline shared by the command line and the tests: hull design,
//! hydrodynamics, drag/controller fixed point per load case, statistics, diagnostic
//! indicators and parked extremes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::centerline::{centerline_response, Channel, CenterlineRao, CenterlineResponse, CenterlineSettings};
use crate::analysis::fatigue::FatigueSettings;
use crate::analysis::modal::{modes_at, pitch_mode};
use crate::analysis::stats::{
    series_statistics, spectral_statistics, weight_statistics, CaseStatistics, DesignStatistics,
};
use crate::analysis::umin::{u_min, Scaling, UminLimits, UminResult};
use crate::control::{
    fixed_point_solve, scheduled_gains, ConvergedCase, ControllerGains, FixedPointSettings, GainPoint, TuningTargets,
};
use crate::environment::{extreme_case, load_case_table, LoadCase, TurbulenceSettings};
use crate::error::{ensure, Error, Result};
use crate::hull::{Design, DesignBasis, DesignGrid};
use crate::hydro::HydroSettings;
use crate::slow::linear::{steady_outputs, LinearModel};
use crate::slow::model::{NonlinearModel, Region};
use crate::slow::mooring::MooringConfig;
use crate::slow::simulate::{ch, simulate_case, SimulationSettings, TimeSeries};
use crate::slow::turbine::TurbineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Freq,
    Time,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "freq" => Ok(Mode::Freq),
            "time" => Ok(Mode::Time),
            "both" => Ok(Mode::Both),
            _ => Err(Error::Parse(format!("unknown mode {s:?}, expected freq, time or both"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSettings {
    pub mode: Mode,
    pub grid: DesignGrid,
    pub basis: DesignBasis,
    pub turbine: TurbineConfig,
    pub mooring: MooringConfig,
    pub hydro: HydroSettings,
    pub turbulence: TurbulenceSettings,
    pub tuning: TuningTargets,
    pub fixed_point: FixedPointSettings,
    pub simulation: SimulationSettings,
    pub fatigue: FatigueSettings,
    pub centerline: CenterlineSettings,
    pub umin: UminLimits,
    /// Base seed; case `i` uses `seed + i`.
    pub seed: u64,
    /// Realizations per operational case in the time domain.
    pub operational_seeds: usize,
    pub extreme_seeds: usize,
    pub extreme_plate_height: f64,
    /// Mean wind of the centerline and indicator evaluation [m/s].
    pub diagnostic_wind_speed: f64,
    /// Peak period of the diagnostic case [s].
    pub diagnostic_tp: f64,
    /// Designs `(d, h_hp)` that also run in the time domain in `both` mode.
    pub time_designs: Vec<(f64, f64)>,
    /// Operational cases replacing the built-in table when non-empty. Weights are
    /// renormalized and seeds reassigned from `seed`.
    pub load_cases: Vec<LoadCase>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            mode: Mode::Freq,
            grid: DesignGrid::default(),
            basis: DesignBasis::default(),
            turbine: TurbineConfig::default(),
            mooring: MooringConfig::default(),
            hydro: HydroSettings::default(),
            turbulence: TurbulenceSettings::default(),
            tuning: TuningTargets::default(),
            fixed_point: FixedPointSettings::default(),
            simulation: SimulationSettings::default(),
            fatigue: FatigueSettings::default(),
            centerline: CenterlineSettings::default(),
            umin: UminLimits::default(),
            seed: 1,
            operational_seeds: 1,
            extreme_seeds: 3,
            extreme_plate_height: 4.5,
            diagnostic_wind_speed: 13.9,
            diagnostic_tp: 9.5,
            time_designs: vec![(15.0, 4.5), (20.0, 4.5), (24.0, 4.5)],
            load_cases: Vec::new(),
        }
    }
}

impl SweepSettings {
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.grid.spacings.is_empty(), InvalidParameter, "empty column-spacing list");
        ensure!(!self.grid.plate_heights.is_empty(), InvalidParameter, "empty heave-plate height list");
        ensure!(self.operational_seeds >= 1, InvalidParameter, "operational_seeds must be at least 1");
        ensure!(self.extreme_seeds >= 1, InvalidParameter, "extreme_seeds must be at least 1");
        ensure!(self.fixed_point.max_iterations >= 1, InvalidParameter, "max_iterations must be at least 1");
        for c in &self.load_cases {
            c.validate()?;
        }
        ensure!(
            self.load_cases.is_empty() || self.load_cases.iter().map(|c| c.weight).sum::<f64>() > 0.0,
            InvalidParameter,
            "load case weights sum to zero"
        );
        self.hydro.validate()?;
        self.turbine.validate()?;
        self.fatigue.validate()?;
        Ok(())
    }

    /// Design basis with the static mooring load filled in.
    pub fn resolved_basis(&self) -> Result<DesignBasis> {
        let mut b = self.basis.clone();
        b.mooring_vertical_load = self.mooring.static_vertical_load()?;
        Ok(b)
    }

    pub fn cases(&self) -> Vec<LoadCase> {
        if self.load_cases.is_empty() {
            return load_case_table(self.seed);
        }
        let total: f64 = self.load_cases.iter().map(|c| c.weight).sum();
        self.load_cases
            .iter()
            .enumerate()
            .map(|(i, c)| LoadCase {
                weight: c.weight / total,
                seed: self.seed + i as u64,
                ..c.clone()
            })
            .collect()
    }

    pub fn model(&self, design: &Design) -> Result<NonlinearModel> {
        NonlinearModel::new(design.clone(), &self.hydro, self.turbine.clone(), self.mooring.clone())
    }
}

/// Fixed-point record of one case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case_id: String,
    pub wind_speed: f64,
    pub region: Option<Region>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub stability_margin: f64,
    pub gains: Option<GainPoint>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub wind_speed: f64,
    pub tp: f64,
    pub pitch_mode_hz: f64,
    pub tower_mode_hz: f64,
    /// Elevation of the system center of mass [m].
    pub system_cm: f64,
    /// `(period, z_cor)` at the configured periods.
    pub wave_zcor: Vec<(f64, f64)>,
    pub wind_zcor: Vec<(f64, f64)>,
    /// Least and largest wave z_cor for periods 7-10 s.
    pub wave_zcor_band: (f64, f64),
    /// Least and largest surge-pitch wave phase difference for periods within 20 % of Tp [deg].
    pub phase_band: (f64, f64),
    pub umin_wave: f64,
    pub umin_wind: f64,
    pub umin_flagged: usize,
}

/// Everything computed for one design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignResult {
    pub design: Design,
    pub gains: Option<ControllerGains>,
    pub outcomes: Vec<CaseOutcome>,
    pub freq_cases: Vec<CaseStatistics>,
    pub time_cases: Vec<CaseStatistics>,
    pub freq: Option<DesignStatistics>,
    pub time: Option<DesignStatistics>,
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip)]
    pub centerline: Vec<CenterlineResponse>,
    #[serde(skip)]
    pub umin: Vec<UminResult>,
    pub failures: Vec<String>,
}

impl DesignResult {
    pub fn complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Mean-of-maxima of the parked extreme runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremeResult {
    pub design_id: String,
    pub spacing: f64,
    pub plate_height: f64,
    pub seeds: Vec<u64>,
    pub max_tower_moment: Vec<f64>,
    pub max_acceleration: Vec<f64>,
    pub mean_max_tower_moment: f64,
    pub mean_max_acceleration: f64,
}

/// Mean-wind band of the wave centerline check [rad/s].
fn period_band(t_lo: f64, t_hi: f64) -> (f64, f64) {
    (2.0 * PI / t_hi, 2.0 * PI / t_lo)
}

/// Centerline and minimum-input diagnostics from a converged case.
pub fn diagnostics(
    model: &mut NonlinearModel,
    cc: &ConvergedCase,
    settings: &SweepSettings,
) -> Result<(Diagnostics, Vec<CenterlineResponse>, Vec<UminResult>)> {
    let op = cc.operating_point;
    let modes = modes_at(model, &op)?;
    let pm = pitch_mode(&modes);
    let tm = modes
        .iter()
        .max_by(|a, b| a.participation[3].total_cmp(&b.participation[3]))
        .copied()
        .ok_or_else(|| Error::Numerical("no modes".into()))?;
    let lin = &cc.linear;
    let t = &model.turbine;
    let draft = model.design.shape.draft;
    let cs = &settings.centerline;
    let to_omega = |ps: &[f64]| -> Vec<f64> { ps.iter().map(|p| 2.0 * PI / p).collect() };
    let wave = centerline_response(lin, t, draft, Channel::Wave, &to_omega(&cs.wave_periods), cs.z_step)?;
    let wind = centerline_response(lin, t, draft, Channel::Wind, &to_omega(&cs.wind_periods), cs.z_step)?;

    let (lo, hi) = period_band(7.0, 10.0);
    let band: Vec<f64> = lin.omega.iter().copied().filter(|w| *w >= lo && *w <= hi).collect();
    let wave_band = centerline_response(lin, t, draft, Channel::Wave, &band, cs.z_step)?;
    let zmin = wave_band.z_cor.iter().copied().fold(f64::INFINITY, f64::min);
    let zmax = wave_band.z_cor.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (plo, phi) = period_band(0.8 * cc.case.tp, 1.2 * cc.case.tp);
    let mut phases = Vec::new();
    for &w in lin.omega.iter().filter(|w| **w >= plo && **w <= phi) {
        phases.push(CenterlineRao::at(lin, Channel::Wave, w)?.phase_difference());
    }
    let pmin = phases.iter().copied().fold(f64::INFINITY, f64::min);
    let pmax = phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let plant = LinearModel::linearize(model, &op, &cc.sigma)?;
    let scaling = Scaling::from_limits(&settings.umin, t)?;
    let uw = u_min(&plant, &scaling, Channel::Wave)?;
    let uv = u_min(&plant, &scaling, Channel::Wind)?;
    let flagged = uw.flagged.iter().chain(&uv.flagged).filter(|f| **f).count();

    let d = Diagnostics {
        wind_speed: cc.case.wind_speed,
        tp: cc.case.tp,
        pitch_mode_hz: pm.hz(),
        tower_mode_hz: tm.hz(),
        system_cm: model.design.mass.system().z_cm,
        wave_zcor: cs.wave_periods.iter().copied().zip(wave.z_cor.iter().copied()).collect(),
        wind_zcor: cs.wind_periods.iter().copied().zip(wind.z_cor.iter().copied()).collect(),
        wave_zcor_band: (zmin, zmax),
        phase_band: (pmin, pmax),
        umin_wave: uw.band_average(settings.umin.band_hz),
        umin_wind: uv.band_average(settings.umin.band_hz),
        umin_flagged: flagged,
    };
    Ok((d, vec![wave, wind, wave_band], vec![uw, uv]))
}

/// Gains used for a time-domain run of `cc`: the schedule anchored at its tuned point.
pub fn case_gains(model: &mut NonlinearModel, cc: &ConvergedCase, settings: &SweepSettings) -> Result<ControllerGains> {
    let base = ControllerGains::from_turbine(&model.turbine);
    match cc.gains {
        Some(g) => scheduled_gains(model, &base, g.omega_reg, &settings.tuning, &[g]),
        None => Ok(base),
    }
}

/// Design-level schedule: tuned points averaged per wind speed, pole placement elsewhere.
fn design_gains(model: &mut NonlinearModel, tuned: &[GainPoint], settings: &SweepSettings) -> Result<ControllerGains> {
    let base = ControllerGains::from_turbine(&model.turbine);
    if tuned.is_empty() {
        return Ok(base);
    }
    let mut anchors: Vec<GainPoint> = Vec::new();
    for p in tuned {
        if anchors.iter().any(|a| a.wind_speed == p.wind_speed) {
            continue;
        }
        let same: Vec<&GainPoint> = tuned.iter().filter(|q| q.wind_speed == p.wind_speed).collect();
        let n = same.len() as f64;
        anchors.push(GainPoint {
            wind_speed: p.wind_speed,
            pitch: p.pitch,
            kp: same.iter().map(|q| q.kp).sum::<f64>() / n,
            ki: same.iter().map(|q| q.ki).sum::<f64>() / n,
            omega_reg: same.iter().map(|q| q.omega_reg).sum::<f64>() / n,
        });
    }
    let omega_reg = anchors.iter().map(|a| a.omega_reg).fold(f64::INFINITY, f64::min);
    let gains = scheduled_gains(model, &base, omega_reg, &settings.tuning, &anchors)?;
    gains.validate()?;
    Ok(gains)
}

/// Run one design through the operational pipeline.
pub fn evaluate_design(design: &Design, settings: &SweepSettings, mode: Mode) -> Result<DesignResult> {
    let mut model = settings.model(design)?;
    let base = ControllerGains::from_turbine(&model.turbine);
    let cases = settings.cases();
    let mut res = DesignResult {
        design: design.clone(),
        gains: None,
        outcomes: Vec::with_capacity(cases.len()),
        freq_cases: Vec::new(),
        time_cases: Vec::new(),
        freq: None,
        time: None,
        diagnostics: None,
        centerline: Vec::new(),
        umin: Vec::new(),
        failures: Vec::new(),
    };
    let spot = settings
        .time_designs
        .iter()
        .any(|&(d, h)| (d - design.shape.spacing()).abs() < 1e-9 && (h - design.shape.plate_height()).abs() < 1e-9);
    let run_time = mode == Mode::Time || (mode == Mode::Both && spot);
    let mut tuned = Vec::new();
    for case in &cases {
        let cc = match fixed_point_solve(&mut model, case, &base, &settings.tuning, &settings.turbulence, &settings.fixed_point) {
            Ok(cc) => cc,
            Err(e) => {
                res.outcomes.push(CaseOutcome {
                    case_id: case.id(),
                    wind_speed: case.wind_speed,
                    region: None,
                    iterations: 0,
                    converged: false,
                    residual: f64::NAN,
                    stability_margin: f64::NAN,
                    gains: None,
                    error: Some(e.to_string()),
                });
                res.failures.push(format!("{}: {e}", case.id()));
                continue;
            }
        };
        let margin = cc.linear.stability_margin();
        res.outcomes.push(CaseOutcome {
            case_id: case.id(),
            wind_speed: case.wind_speed,
            region: Some(cc.operating_point.region),
            iterations: cc.iterations,
            converged: cc.converged,
            residual: cc.residual,
            stability_margin: margin,
            gains: cc.gains,
            error: None,
        });
        if !cc.converged {
            res.failures.push(format!("{}: fixed point not converged (residual {:.2e})", case.id(), cc.residual));
        }
        if margin >= 0.0 {
            res.failures.push(format!("{}: closed loop unstable (max Re {margin:.3e})", case.id()));
        }
        if let Some(g) = cc.gains {
            tuned.push(g);
        }
        if mode != Mode::Time {
            let means = steady_outputs(&model, &cc.operating_point);
            res.freq_cases.push(spectral_statistics(&design.id, case, &means, &cc.spectra, &settings.fatigue)?);
        }
        if (case.wind_speed - settings.diagnostic_wind_speed).abs() < 1e-9 && (case.tp - settings.diagnostic_tp).abs() < 1e-9 {
            match diagnostics(&mut model, &cc, settings) {
                Ok((d, cl, um)) => {
                    res.diagnostics = Some(d);
                    res.centerline = cl;
                    res.umin = um;
                }
                Err(e) => res.failures.push(format!("diagnostics: {e}")),
            }
        }
        if run_time {
            for s in 0..settings.operational_seeds {
                let mut c = case.clone();
                c.seed = case.seed + 1000 * s as u64;
                c.weight = case.weight / settings.operational_seeds as f64;
                let run = case_gains(&mut model, &cc, settings)
                    .and_then(|g| simulate_case(&mut model, &c, &g, &settings.turbulence, &settings.simulation))
                    .and_then(|(_, ts)| series_statistics(&design.id, &c, &ts, &settings.fatigue));
                match run {
                    Ok(st) => res.time_cases.push(st),
                    Err(e) => res.failures.push(format!("{} seed {}: {e}", case.id(), c.seed)),
                }
            }
        }
    }
    match design_gains(&mut model, &tuned, settings) {
        Ok(g) => res.gains = Some(g),
        Err(e) => res.failures.push(format!("gain schedule: {e}")),
    }
    let full = res.outcomes.iter().all(|o| o.error.is_none());
    if full && !res.freq_cases.is_empty() {
        res.freq = Some(weight_statistics(&res.freq_cases, &settings.fatigue)?);
    }
    if full && run_time && res.time_cases.len() == cases.len() * settings.operational_seeds {
        res.time = Some(weight_statistics(&res.time_cases, &settings.fatigue)?);
    }
    Ok(res)
}

/// Parked extreme runs of one design; returns maxima per seed and their means.
pub fn evaluate_extreme(design: &Design, settings: &SweepSettings) -> Result<(ExtremeResult, Vec<TimeSeries>)> {
    let mut model = settings.model(design)?;
    let gains = ControllerGains::from_turbine(&model.turbine);
    let mut out = ExtremeResult {
        design_id: design.id.clone(),
        spacing: design.shape.spacing(),
        plate_height: design.shape.plate_height(),
        seeds: Vec::new(),
        max_tower_moment: Vec::new(),
        max_acceleration: Vec::new(),
        mean_max_tower_moment: 0.0,
        mean_max_acceleration: 0.0,
    };
    let mut series = Vec::new();
    for s in 0..settings.extreme_seeds {
        let seed = settings.seed + 500 + s as u64;
        let case = extreme_case(seed);
        let (_, ts) = simulate_case(&mut model, &case, &gains, &settings.turbulence, &settings.simulation)?;
        let peak = |c: usize| ts.columns[c].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        out.seeds.push(seed);
        out.max_tower_moment.push(peak(ch::MYT));
        out.max_acceleration.push(peak(ch::ACC));
        series.push(ts);
    }
    let n = out.seeds.len() as f64;
    out.mean_max_tower_moment = out.max_tower_moment.iter().sum::<f64>() / n;
    out.mean_max_acceleration = out.max_acceleration.iter().sum::<f64>() / n;
    Ok((out, series))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parses() {
        assert_eq!("both".parse::<Mode>().unwrap(), Mode::Both);
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn defaults_validate() {
        let s = SweepSettings::default();
        s.validate().unwrap();
        assert_eq!(s.cases().len(), 21);
        assert_eq!(s.grid.points().len(), 30);
    }

    #[test]
    fn custom_cases_are_renormalized() {
        let s: SweepSettings = serde_json::from_str(
            r#"{"seed": 7, "load_cases": [{"wind_speed": 8, "hs": 2, "tp": 8, "weight": 3},
                                           {"wind_speed": 12, "hs": 3, "tp": 9, "weight": 1}]}"#,
        )
        .unwrap();
        s.validate().unwrap();
        let c = s.cases();
        assert_eq!(c.len(), 2);
        assert!((c[0].weight - 0.75).abs() < 1e-12);
        assert_eq!((c[0].seed, c[1].seed), (7, 8));
        assert_eq!(c[1].duration, crate::environment::DEFAULT_DURATION);
    }
}
