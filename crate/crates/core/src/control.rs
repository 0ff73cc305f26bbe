//! Below-rated torque law, gain-scheduled PI blade pitch control, automated tuning and
//! the drag/controller fixed-point iteration.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analysis::modal::{modes_at, pitch_mode};
use crate::analysis::spectra::{node_sigmas, output_spectra, CaseSpectra, OutputSpectra};
use crate::environment::{LoadCase, TurbulenceSettings};
use crate::error::{ensure, Error, Result};
use crate::hydro::{heave_plate_cd, keulegan_carpenter, KcFit, NodeKind};
use crate::numerics::interp1;
use crate::slow::linear::{LinearModel, Transfer};
use crate::slow::model::{NonlinearModel, OperatingPoint, Region};
use crate::slow::turbine::TurbineConfig;

/// PI gains at one scheduled operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPoint {
    pub wind_speed: f64,
    /// Steady blade pitch [rad], the key when scheduling on pitch.
    pub pitch: f64,
    /// Proportional gain [rad s/rad].
    pub kp: f64,
    /// Integral gain [rad/rad].
    pub ki: f64,
    /// Regulator natural frequency used for the gains [rad/s].
    pub omega_reg: f64,
}

/// Variable the time-domain controller interpolates its gains over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKey {
    /// Gains of the case mean wind, held for the whole run.
    #[default]
    MeanWind,
    /// Gains follow the instantaneous blade pitch.
    BladePitch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub torque_constant: f64,
    pub rated_torque: f64,
    pub rated_speed: f64,
    pub min_pitch: f64,
    pub max_pitch: f64,
    /// Pitch above `min_pitch` at which the torque switches to rated [rad].
    pub pitch_margin: f64,
    /// Sorted by wind speed.
    pub schedule: Vec<GainPoint>,
    #[serde(default)]
    pub schedule_key: ScheduleKey,
}

impl ControllerGains {
    pub fn from_turbine(t: &TurbineConfig) -> Self {
        Self {
            torque_constant: t.torque_constant(),
            rated_torque: t.rated_torque(),
            rated_speed: t.rated_rotor_speed,
            min_pitch: t.min_pitch,
            max_pitch: t.max_pitch,
            pitch_margin: 1f64.to_radians(),
            schedule: Vec::new(),
            schedule_key: ScheduleKey::default(),
        }
    }

    /// Constant PI gains.
    pub fn fixed(t: &TurbineConfig, kp: f64, ki: f64) -> Self {
        Self::from_turbine(t).with_point(GainPoint {
            wind_speed: t.rated_wind_speed(),
            pitch: t.min_pitch,
            kp,
            ki,
            omega_reg: 0.0,
        })
    }

    pub fn with_point(mut self, p: GainPoint) -> Self {
        self.schedule.retain(|q| q.wind_speed != p.wind_speed);
        self.schedule.push(p);
        self.schedule.sort_by(|a, b| a.wind_speed.total_cmp(&b.wind_speed));
        self
    }

    /// Gains a run at mean wind `v` uses: frozen at `v` unless scheduled on pitch.
    pub fn for_mean_wind(&self, v: f64) -> Self {
        if self.schedule_key == ScheduleKey::BladePitch || self.schedule.len() < 2 {
            return self.clone();
        }
        let (kp, ki) = self.gains_at_wind(v);
        let omega_reg = interp1(
            &self.schedule.iter().map(|p| p.wind_speed).collect::<Vec<_>>(),
            &self.schedule.iter().map(|p| p.omega_reg).collect::<Vec<_>>(),
            v,
        );
        let pitch = interp1(
            &self.schedule.iter().map(|p| p.wind_speed).collect::<Vec<_>>(),
            &self.schedule.iter().map(|p| p.pitch).collect::<Vec<_>>(),
            v,
        );
        let mut g = self.clone();
        g.schedule = vec![GainPoint { wind_speed: v, pitch, kp, ki, omega_reg }];
        g
    }

    fn interp(&self, key: impl Fn(&GainPoint) -> f64, x: f64) -> (f64, f64) {
        match self.schedule.len() {
            0 => (0.0, 0.0),
            1 => (self.schedule[0].kp, self.schedule[0].ki),
            _ => {
                let xs: Vec<f64> = self.schedule.iter().map(&key).collect();
                let kp: Vec<f64> = self.schedule.iter().map(|p| p.kp).collect();
                let ki: Vec<f64> = self.schedule.iter().map(|p| p.ki).collect();
                (interp1(&xs, &kp, x), interp1(&xs, &ki, x))
            }
        }
    }

    /// Piecewise-linear gains over mean wind speed, clamped at the ends.
    pub fn gains_at_wind(&self, v: f64) -> (f64, f64) {
        self.interp(|p| p.wind_speed, v)
    }

    /// Piecewise-linear gains over blade pitch, clamped at the ends.
    pub fn gains_at_pitch(&self, pitch: f64) -> (f64, f64) {
        if self.schedule.windows(2).any(|w| w[1].pitch <= w[0].pitch) {
            return self.gains_at_wind(self.schedule.last().map(|p| p.wind_speed).unwrap_or(0.0));
        }
        self.interp(|p| p.pitch, pitch)
    }

    /// `K Omega^2` saturated at rated torque.
    pub fn torque_law(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        (self.torque_constant * omega * omega).min(self.rated_torque)
    }

    /// Generator torque and pitch command for filtered speed, pitch and integrator states.
    pub fn commands(&self, omega_f: f64, pitch: f64, integrator: f64) -> (f64, f64) {
        let m_g = if pitch > self.min_pitch + self.pitch_margin {
            self.rated_torque
        } else {
            self.torque_law(omega_f)
        };
        let (kp, _) = self.gains_at_pitch(pitch);
        let cmd = (kp * (omega_f - self.rated_speed) + integrator).clamp(self.min_pitch, self.max_pitch);
        (m_g, cmd)
    }

    /// Integrator rate with conditional integration at the pitch limits.
    pub fn integrator_rate(&self, omega_f: f64, pitch: f64, integrator: f64) -> f64 {
        let (_, ki) = self.gains_at_pitch(pitch);
        let rate = ki * (omega_f - self.rated_speed);
        if (integrator <= self.min_pitch && rate < 0.0) || (integrator >= self.max_pitch && rate > 0.0) {
            0.0
        } else {
            rate
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.torque_constant > 0.0, InvalidParameter, "torque constant must be positive");
        ensure!(self.rated_torque > 0.0, InvalidParameter, "rated torque must be positive");
        for p in &self.schedule {
            ensure!(
                p.kp > 0.0 && p.ki > 0.0,
                InvalidParameter,
                "non-positive PI gains at {} m/s",
                p.wind_speed
            );
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        v["schema"] = "hullsweep/gains/v1".into();
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

/// Tuning targets for the above-rated regulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuningTargets {
    /// Upper bound of the regulator frequency [Hz].
    pub max_regulator_hz: f64,
    /// Regulator frequency cap as a fraction of the platform pitch frequency.
    pub pitch_fraction: f64,
    pub damping_ratio: f64,
    pub reduction: f64,
    pub max_reductions: usize,
    /// Rotor-speed filter corner [Hz].
    pub filter_hz: f64,
    /// Damping ratio sought for pitch-dominated closed-loop modes; when out of reach the best-damped stable gains are kept.
    pub min_pitch_damping: f64,
    /// Pitch kinetic-energy share above which a mode counts as pitch-dominated.
    pub pitch_share: f64,
    pub schedule_key: ScheduleKey,
}

impl Default for TuningTargets {
    fn default() -> Self {
        Self {
            max_regulator_hz: 0.06,
            pitch_fraction: 0.7,
            damping_ratio: 0.7,
            reduction: 0.8,
            max_reductions: 10,
            filter_hz: 0.5,
            min_pitch_damping: 0.1,
            pitch_share: 0.3,
            schedule_key: ScheduleKey::MeanWind,
        }
    }
}

impl TuningTargets {
    pub fn filter_omega(&self) -> f64 {
        2.0 * PI * self.filter_hz
    }
}

/// PI gains placing the rigid rotor-speed loop `J dOmega = dQ/dtheta (kp e + ki int e)`
/// at natural frequency `omega_reg` and damping `zeta`; aerodynamic speed damping is left as margin.
pub fn pole_placement(dq_dpitch: f64, inertia: f64, omega_reg: f64, zeta: f64) -> Result<(f64, f64)> {
    ensure!(dq_dpitch < 0.0, Infeasible, "torque does not decrease with pitch (dQ/dtheta = {dq_dpitch:.3e})");
    ensure!(inertia > 0.0 && omega_reg > 0.0, InvalidParameter, "inertia and regulator frequency must be positive");
    let ki = -inertia * omega_reg * omega_reg / dq_dpitch;
    let kp = -2.0 * zeta * omega_reg * inertia / dq_dpitch;
    Ok((kp, ki))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunedLoop {
    pub point: GainPoint,
    pub reductions: usize,
    /// Largest real part of the closed-loop spectrum.
    pub margin: f64,
    pub pitch_damping: f64,
}

/// Least damping ratio among pitch-dominated oscillatory modes within an octave of `omega_pitch`.
pub fn pitch_damping(lin: &LinearModel, mass_diag: &[f64; 4], share: f64, omega_pitch: f64) -> f64 {
    crate::analysis::modal::state_modes(&lin.a, mass_diag)
        .iter()
        .filter(|m| {
            let w = m.eigenvalue.norm();
            m.participation[2] >= share && w >= 0.5 * omega_pitch && w <= 2.0 * omega_pitch
        })
        .map(|m| m.damping_ratio)
        .fold(f64::INFINITY, f64::min)
}

/// Pole placement with detuning below the platform pitch mode, checked on the full closed loop.
pub fn tune_pi(
    plant: &LinearModel,
    base: &ControllerGains,
    omega_pitch: f64,
    inertia: f64,
    mass_diag: &[f64; 4],
    targets: &TuningTargets,
) -> Result<TunedLoop> {
    let op = &plant.operating_point;
    ensure!(
        op.region == Region::AboveRated,
        InvalidParameter,
        "PI tuning needs an above-rated operating point"
    );
    let mut omega_reg = (2.0 * PI * targets.max_regulator_hz).min(targets.pitch_fraction * omega_pitch);
    let mut last = f64::NAN;
    let mut best: Option<TunedLoop> = None;
    for r in 0..=targets.max_reductions {
        let (kp, ki) = pole_placement(
            plant.slopes.dq_dpitch,
            inertia,
            omega_reg,
            targets.damping_ratio,
        )?;
        let point = GainPoint {
            wind_speed: op.wind_speed,
            pitch: op.pitch,
            kp,
            ki,
            omega_reg,
        };
        let gains = base.clone().with_point(point);
        let closed = plant.close(&gains, targets.filter_omega())?;
        last = closed.stability_margin();
        let zeta = pitch_damping(&closed, mass_diag, targets.pitch_share, omega_pitch);
        if last < 0.0 {
            let tuned = TunedLoop {
                point,
                reductions: r,
                margin: last,
                pitch_damping: zeta,
            };
            if zeta >= targets.min_pitch_damping {
                return Ok(tuned);
            }
            if best.as_ref().is_none_or(|b| zeta > b.pitch_damping) {
                best = Some(tuned);
            }
        }
        omega_reg *= targets.reduction;
    }
    // Damping target out of reach: keep the best-damped stable candidate.
    best.ok_or_else(|| {
        Error::Unstable(format!(
            "no stabilizing PI gains at {} m/s (max Re = {last:.3e})",
            op.wind_speed
        ))
    })
}

/// Pitch-scheduled gains holding the regulator frequency and damping across above-rated
/// operating points, so the rotor loop keeps its tuned dynamics as `dQ/dtheta` varies.
/// Tuned `anchors` replace the pole-placement points near their wind speeds.
pub fn scheduled_gains(
    model: &mut NonlinearModel,
    base: &ControllerGains,
    omega_reg: f64,
    targets: &TuningTargets,
    anchors: &[GainPoint],
) -> Result<ControllerGains> {
    let t = &model.turbine;
    let v_rated = t.rated_wind_speed();
    let (lo, hi) = (v_rated + 0.25, t.cut_out);
    let n = ((hi - lo) / 1.0).ceil() as usize;
    let mut gains = base.clone();
    gains.schedule.clear();
    for i in 0..=n {
        let v = lo + (hi - lo) * i as f64 / n.max(1) as f64;
        if anchors.iter().any(|a| (a.wind_speed - v).abs() < 0.3) {
            continue;
        }
        let op = model.operating_point(v)?;
        if op.region != Region::AboveRated {
            continue;
        }
        let s = crate::slow::linear::aero_slopes(model, &op, crate::slow::linear::SLOPE_STEPS)?;
        let (kp, ki) = pole_placement(
            s.dq_dpitch,
            model.turbine.drivetrain_inertia,
            omega_reg,
            targets.damping_ratio,
        )?;
        gains = gains.with_point(GainPoint {
            wind_speed: v,
            pitch: op.pitch,
            kp,
            ki,
            omega_reg,
        });
    }
    for a in anchors {
        gains = gains.with_point(*a);
    }
    gains.schedule_key = targets.schedule_key;
    Ok(gains)
}

/// Fixed-point iteration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedPointSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Weight of the new drag coefficient in each update.
    pub relaxation: f64,
    pub kc_fit: KcFit,
}

impl Default for FixedPointSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            max_iterations: 20,
            relaxation: 0.5,
            kc_fit: KcFit::default(),
        }
    }
}

/// Converged frequency-domain solution of one (design, load case) pair.
#[derive(Debug, Clone)]
pub struct ConvergedCase {
    pub design_id: String,
    pub case: LoadCase,
    pub operating_point: OperatingPoint,
    pub cd: Vec<f64>,
    pub sigma: Vec<f64>,
    pub gains: Option<GainPoint>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    /// Closed loop at the converged drag and gains.
    pub linear: LinearModel,
    pub transfer: Transfer,
    pub disturbance: CaseSpectra,
    pub spectra: OutputSpectra,
}

impl ConvergedCase {
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "design_id": self.design_id,
            "case": self.case.id(),
            "wind_speed": self.case.wind_speed,
            "region": self.operating_point.region,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "gains": self.gains,
            "stability_margin": self.linear.stability_margin(),
            "output_std": self.spectra.stds(),
        })
    }
}

fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let scale = new.iter().chain(old).fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    new.iter()
        .zip(old)
        .map(|(a, b)| (a - b).abs() / scale)
        .fold(0.0, f64::max)
}

/// Drag coefficient targets from node velocity STDs: heave-plate keel nodes follow
/// the KC fit with amplitude `sqrt(2) sigma` and period `Tp`; other nodes are fixed.
pub fn drag_targets(model: &NonlinearModel, sigma: &[f64], tp: f64, fit: &KcFit) -> Result<Vec<f64>> {
    model
        .nodes
        .iter()
        .zip(sigma)
        .map(|(n, &s)| match n.kind {
            NodeKind::Keel => heave_plate_cd(keulegan_carpenter(2f64.sqrt() * s, tp, n.diameter), fit),
            _ => Ok(n.cd),
        })
        .collect()
}

/// Iterate linearization, PI tuning, response spectra and drag update until the node
/// velocity STDs and gains settle. Leaves the converged drag coefficients on `model`.
pub fn fixed_point_solve(
    model: &mut NonlinearModel,
    case: &LoadCase,
    base: &ControllerGains,
    targets: &TuningTargets,
    turbulence: &TurbulenceSettings,
    settings: &FixedPointSettings,
) -> Result<ConvergedCase> {
    case.validate()?;
    model.reset_warm_start();
    let op = model.operating_point(case.wind_speed)?;
    let omega_pitch = pitch_mode(&modes_at(model, &op)?).omega;
    let mm = &model.structure.mass;
    let mass_diag = [mm[(0, 0)], mm[(1, 1)], mm[(2, 2)], mm[(3, 3)]];
    let disturbance = CaseSpectra::for_case(
        case,
        turbulence,
        2.0 * model.turbine.rotor_radius,
        &model.hydro.omega,
        &model.hydro.drift,
    )?;

    // unit-response estimate: water velocity at a fixed hull
    let mut sigma: Vec<f64> = (0..model.nodes.len())
        .map(|n| {
            let lin_free = &model.hydro;
            let s: Vec<f64> = lin_free
                .omega
                .iter()
                .zip(&disturbance.wave)
                .map(|(&w, &sw)| {
                    let k = crate::hydro::wave_number(w, lin_free.water_depth).unwrap_or(w * w / 9.81);
                    model.nodes[n]
                        .water_velocity(w, k, lin_free.water_depth, lin_free.heading)
                        .norm_sqr()
                        * sw
                })
                .collect();
            crate::numerics::trapz(&lin_free.omega, &s).sqrt()
        })
        .collect();
    let cd0 = drag_targets(model, &sigma, case.tp, &settings.kc_fit)?;
    for (n, c) in model.nodes.iter_mut().zip(cd0) {
        n.cd = c;
    }

    let mut gains: Option<GainPoint> = None;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut last: Option<(LinearModel, Transfer, OutputSpectra)> = None;
    for it in 1..=settings.max_iterations {
        iterations = it;
        let plant = LinearModel::linearize(model, &op, &sigma)?;
        let (closed, point) = match op.region {
            Region::AboveRated => {
                let tuned = tune_pi(
                    &plant,
                    base,
                    omega_pitch,
                    model.turbine.drivetrain_inertia,
                    &mass_diag,
                    targets,
                )?;
                let g = base.clone().with_point(tuned.point);
                (plant.close(&g, targets.filter_omega())?, Some(tuned.point))
            }
            _ => (plant.close(base, targets.filter_omega())?, None),
        };
        let tr = closed.transfer()?;
        let new_sigma = node_sigmas(&tr, &disturbance);
        let spectra = output_spectra(&tr, &disturbance);

        let mut change = relative_change(&new_sigma, &sigma);
        if let (Some(a), Some(b)) = (point, gains) {
            change = change.max(relative_change(&[a.kp, a.ki], &[b.kp, b.ki]));
        }
        let target = drag_targets(model, &new_sigma, case.tp, &settings.kc_fit)?;
        for (n, c) in model.nodes.iter_mut().zip(target) {
            n.cd = (1.0 - settings.relaxation) * n.cd + settings.relaxation * c;
        }
        sigma = new_sigma;
        let comparable = point.is_none() || gains.is_some();
        gains = point;
        residual = change;
        last = Some((closed, tr, spectra));
        if change < settings.tolerance && comparable {
            break;
        }
    }
    let (linear, transfer, spectra) = last.expect("at least one iteration");
    Ok(ConvergedCase {
        design_id: model.design.id.clone(),
        case: case.clone(),
        operating_point: op,
        cd: model.nodes.iter().map(|n| n.cd).collect(),
        sigma,
        gains,
        iterations,
        converged: residual < settings.tolerance,
        residual,
        linear,
        transfer,
        disturbance,
        spectra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> ControllerGains {
        let t = TurbineConfig::default();
        let p = |v: f64, pitch: f64, kp: f64| GainPoint { wind_speed: v, pitch, kp, ki: 0.1 * kp, omega_reg: 0.1 };
        ControllerGains::from_turbine(&t).with_point(p(12.0, 0.05, 1.0)).with_point(p(16.0, 0.25, 0.5))
    }

    #[test]
    fn mean_wind_key_freezes_gains() {
        let g = two_point().for_mean_wind(14.0);
        assert_eq!(g.schedule.len(), 1);
        assert!((g.schedule[0].kp - 0.75).abs() < 1e-12);
        // pitch no longer moves the gains
        assert_eq!(g.gains_at_pitch(0.05), g.gains_at_pitch(0.25));
    }

    #[test]
    fn pitch_key_keeps_schedule() {
        let mut g = two_point();
        g.schedule_key = ScheduleKey::BladePitch;
        let h = g.for_mean_wind(14.0);
        assert_eq!(h, g);
        assert!((h.gains_at_pitch(0.05).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torque_law_limits() {
        let g = ControllerGains::from_turbine(&TurbineConfig::default());
        assert_eq!(g.torque_law(0.0), 0.0);
        assert_eq!(g.torque_law(10.0), g.rated_torque);
        let w = 0.6;
        assert!((g.torque_law(w) - g.torque_constant * w * w).abs() < 1e-9);
    }

    #[test]
    fn optimal_tsr_power_matches_peak_cp() {
        let t = TurbineConfig::default();
        let g = ControllerGains::from_turbine(&t);
        let (tsr, cp) = t.optimal_tsr();
        let v = 7.0;
        let w = tsr * v / t.rotor_radius;
        let p_aero = 0.5 * t.air_density * t.swept_area() * cp * v.powi(3);
        assert!((g.torque_law(w) * w - p_aero).abs() < 1e-6 * p_aero);
    }

    #[test]
    fn pole_placement_closed_form() {
        let (j, qt, wr, z) = (1.0e8, -2.0e7, 0.2, 0.7);
        let (kp, ki) = pole_placement(qt, j, wr, z).unwrap();
        // characteristic polynomial s^2 - qt kp / J s - qt ki / J
        let a1 = -qt * kp / j;
        let a0 = -qt * ki / j;
        assert!((a0 - wr * wr).abs() < 1e-12);
        assert!((a1 - 2.0 * z * wr).abs() < 1e-12);
    }

    #[test]
    fn pole_placement_rejects_wrong_sign() {
        assert!(pole_placement(1.0, 1.0, 0.1, 0.7).is_err());
    }

    #[test]
    fn commands_switch_regions() {
        let t = TurbineConfig::default();
        let g = ControllerGains::fixed(&t, 0.5, 0.1);
        let (m, c) = g.commands(0.5 * g.rated_speed, 0.0, 0.0);
        assert!(m < g.rated_torque);
        assert_eq!(c, 0.0);
        let (m, _) = g.commands(g.rated_speed, 0.1, 0.1);
        assert_eq!(m, g.rated_torque);
        assert_eq!(g.integrator_rate(0.5, 0.0, 0.0), 0.0);
        assert!(g.integrator_rate(2.0, 0.0, 0.0) > 0.0);
    }

    #[test]
    fn schedule_interpolates_without_sign_change() {
        let t = TurbineConfig::default();
        let g = ControllerGains::from_turbine(&t)
            .with_point(GainPoint { wind_speed: 13.0, pitch: 0.1, kp: 1.0, ki: 0.2, omega_reg: 0.1 })
            .with_point(GainPoint { wind_speed: 21.0, pitch: 0.3, kp: 0.4, ki: 0.1, omega_reg: 0.1 });
        let (kp, ki) = g.gains_at_wind(17.0);
        assert!((kp - 0.7).abs() < 1e-12 && (ki - 0.15).abs() < 1e-12);
        assert_eq!(g.gains_at_pitch(1.0), (0.4, 0.1));
        g.validate().unwrap();
    }
}
