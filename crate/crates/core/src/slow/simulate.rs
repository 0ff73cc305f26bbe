//! Fixed-step RK4 integration of the nonlinear closed-loop model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::ControllerGains;
use crate::environment::{
    rotor_effective_wind, Components, LoadCase, TurbulenceSettings, WaveSpectrum, WindSpectrum,
};
use crate::error::{ensure, Error, Result};
use crate::hydro::wave_number;
use crate::slow::model::{idx, Excitation, NonlinearModel, OperatingPoint, Region, NSTATE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationSettings {
    pub dt: f64,
    /// Platform pitch beyond which a run is flagged unstable [rad].
    pub pitch_limit: f64,
    /// Surge beyond which a run is flagged unstable [m].
    pub surge_limit: f64,
    /// Include the slow-drift surge force.
    pub slow_drift: bool,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            dt: 0.05,
            pitch_limit: 0.6,
            surge_limit: 300.0,
            slow_drift: true,
        }
    }
}

pub const CHANNELS: [&str; 14] = [
    "time",
    "surge",
    "heave",
    "pitch",
    "tower_deflection",
    "rotor_speed",
    "blade_pitch",
    "generator_torque",
    "thrust",
    "tower_base_moment",
    "power",
    "tower_top_acceleration",
    "wind",
    "elevation",
];

pub mod ch {
    pub const TIME: usize = 0;
    pub const SURGE: usize = 1;
    pub const HEAVE: usize = 2;
    pub const PITCH: usize = 3;
    pub const TOWER: usize = 4;
    pub const ROTOR: usize = 5;
    pub const BLADE: usize = 6;
    pub const TORQUE: usize = 7;
    pub const THRUST: usize = 8;
    pub const MYT: usize = 9;
    pub const POWER: usize = 10;
    pub const ACC: usize = 11;
    pub const WIND: usize = 12;
    pub const ELEVATION: usize = 13;
}

/// Output histories, one column per entry of `CHANNELS`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub columns: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        CHANNELS
            .iter()
            .position(|c| *c == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: hullsweep/timeseries/v1\n");
        s.push_str(&CHANNELS.join(","));
        s.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.columns.iter().map(|c| format!("{:.6e}", c[i])).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// Wave and wind histories of a load case at half the integration step.
pub fn case_excitation(
    model: &NonlinearModel,
    case: &LoadCase,
    turbulence: &TurbulenceSettings,
    settings: &SimulationSettings,
) -> Result<Excitation> {
    case.validate()?;
    let half = 0.5 * settings.dt;
    let spec = WaveSpectrum::jonswap(case.hs, case.tp, None)?;
    let waves = Components::from_spectrum(|w| spec.density(w), case.duration, case.seed, 0);
    let n = waves.samples(half)?;
    let hydro = &model.hydro;
    let depth = hydro.water_depth;
    let wave_force = [0, 1, 2].map(|m| waves.synthesize(n, |w| hydro.excitation_at(w)[m]));
    let ks: Vec<f64> = waves
        .omegas
        .iter()
        .map(|&w| wave_number(w, depth))
        .collect::<Result<_>>()?;
    let k_at = |w: f64| -> f64 {
        let i = waves.omegas.partition_point(|&x| x < w).min(ks.len() - 1);
        ks[i]
    };
    let node_velocity = model
        .nodes
        .iter()
        .map(|node| waves.synthesize(n, |w| node.water_velocity(w, k_at(w), depth, hydro.heading)))
        .collect();
    let drift = if settings.slow_drift {
        waves
            .synthesize_complex(n, |w| Complex64::new(hydro.drift_at(w).max(0.0).sqrt(), 0.0))
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    } else {
        vec![0.0; n]
    };
    let elevation = waves.synthesize(n, |_| Complex64::new(1.0, 0.0));

    let wind = if case.wind_speed > 0.0 {
        let ws = WindSpectrum::kaimal(
            case.wind_speed,
            turbulence.sigma(case.wind_speed),
            turbulence.length_scale,
            2.0 * model.turbine.rotor_radius,
        )?;
        let parked = case.wind_speed < model.turbine.cut_in || case.wind_speed > model.turbine.cut_out;
        let amp = if parked { 0.0 } else { turbulence.harmonic_3p * case.wind_speed };
        let r = rotor_effective_wind(&ws, amp, 3.0 * model.turbine.rated_rotor_speed, case.seed, case.duration, half)?;
        ensure!(r.speed.len() == n, Numerical, "wind and wave records differ in length");
        r.speed
    } else {
        vec![0.0; n]
    };
    Ok(Excitation {
        half_step: case.duration / n as f64,
        wind,
        wave_force,
        drift,
        node_velocity,
        elevation,
    })
}

/// Integrate from `x0` over the whole excitation record, keeping samples after `transient`.
pub fn integrate(
    model: &mut NonlinearModel,
    x0: [f64; NSTATE],
    env: &Excitation,
    gains: &ControllerGains,
    region: Region,
    settings: &SimulationSettings,
    transient: f64,
) -> Result<TimeSeries> {
    ensure!(env.len() >= 2, InvalidParameter, "excitation record too short");
    let dt = 2.0 * env.half_step;
    let steps = env.len() / 2;
    let skip = (transient / dt).round() as usize;
    ensure!(skip < steps, InvalidParameter, "transient {transient} s exceeds the record");
    let mut columns = vec![Vec::with_capacity(steps - skip); CHANNELS.len()];
    let tt = model.structure.tower_top;
    let eta = model.turbine.generator_efficiency;
    let wrap = |k: usize| k % env.len();
    let mut x = x0;
    for i in 0..steps {
        let k = 2 * i;
        let (k1, loads) = model.derivative(&x, wrap(k), env, gains, region)?;
        if i >= skip {
            let acc = tt[0] * k1[4] + tt[1] * k1[5] + tt[2] * k1[6] + tt[3] * k1[7];
            let row = [
                i as f64 * dt,
                x[idx::SURGE],
                x[idx::HEAVE],
                x[idx::PITCH],
                x[idx::TOWER],
                x[idx::ROTOR],
                x[idx::BLADE],
                loads.generator_torque,
                loads.thrust,
                model.structure.tower_base_moment(x[idx::PITCH], x[idx::TOWER]),
                eta * loads.generator_torque * x[idx::ROTOR],
                acc,
                env.wind[wrap(k)],
                env.elevation[wrap(k)],
            ];
            for (c, v) in columns.iter_mut().zip(row) {
                c.push(v);
            }
        }
        let stage = |x: &[f64; NSTATE], d: &[f64; NSTATE], h: f64| {
            let mut y = *x;
            for j in 0..NSTATE {
                y[j] += h * d[j];
            }
            y
        };
        let (k2, _) = model.derivative(&stage(&x, &k1, 0.5 * dt), wrap(k + 1), env, gains, region)?;
        let (k3, _) = model.derivative(&stage(&x, &k2, 0.5 * dt), wrap(k + 1), env, gains, region)?;
        let (k4, _) = model.derivative(&stage(&x, &k3, dt), wrap(k + 2), env, gains, region)?;
        for j in 0..NSTATE {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if x[idx::PITCH].abs() > settings.pitch_limit || x[idx::SURGE].abs() > settings.surge_limit {
            return Err(Error::Unstable(format!(
                "state bound exceeded at t = {:.2} s: pitch {:.3} rad, surge {:.2} m",
                (i + 1) as f64 * dt,
                x[idx::PITCH],
                x[idx::SURGE]
            )));
        }
    }
    Ok(TimeSeries { dt, columns })
}

/// Closed-loop simulation of a load case from its operating point; the case transient is discarded.
pub fn simulate_case(
    model: &mut NonlinearModel,
    case: &LoadCase,
    gains: &ControllerGains,
    turbulence: &TurbulenceSettings,
    settings: &SimulationSettings,
) -> Result<(OperatingPoint, TimeSeries)> {
    model.reset_warm_start();
    let op = model.operating_point(case.wind_speed)?;
    let env = case_excitation(model, case, turbulence, settings)?;
    let mean_drift = env.drift.iter().sum::<f64>() / env.len() as f64;
    let start = model.operating_point_with(case.wind_speed, mean_drift)?;
    let x0 = model.initial_state(&start);
    let gains = gains.for_mean_wind(case.wind_speed);
    let ts = integrate(model, x0, &env, &gains, op.region, settings, case.transient)?;
    Ok((op, ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::DlcKind;
    use crate::hull::{solve_draft_for_c55, DesignBasis, ShapeParams};
    use crate::hydro::HydroSettings;
    use crate::slow::mooring::MooringConfig;
    use crate::slow::turbine::TurbineConfig;

    fn model() -> NonlinearModel {
        let turbine = TurbineConfig::default();
        let mooring = MooringConfig::default();
        let basis = DesignBasis {
            mooring_vertical_load: mooring.static_vertical_load().unwrap(),
            ..Default::default()
        };
        let design =
            solve_draft_for_c55(ShapeParams::new(20.0, 4.5).unwrap(), basis.c55_target, &basis, &turbine).unwrap();
        NonlinearModel::new(design, &HydroSettings::default(), turbine, mooring).unwrap()
    }

    #[test]
    fn steady_wind_holds_operating_point() {
        let mut m = model();
        let gains = ControllerGains::fixed(&m.turbine, 0.5, 0.05);
        let op = m.operating_point(8.0).unwrap();
        let env = Excitation::steady(8.0, 0.025, 2000, m.nodes.len());
        let x0 = m.initial_state(&op);
        let ts = integrate(&mut m, x0, &env, &gains, op.region, &Default::default(), 0.0).unwrap();
        let pitch = &ts.columns[ch::PITCH];
        let drift = pitch.iter().map(|p| (p - op.q[2]).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-6, "{drift}");
        let w = &ts.columns[ch::ROTOR];
        assert!(w.iter().all(|v| (v - op.rotor_speed).abs() < 1e-6));
    }

    #[test]
    fn excitation_is_seed_deterministic() {
        let m = model();
        let case = LoadCase {
            wind_speed: 13.9,
            hs: 2.0,
            tp: 8.0,
            weight: 1.0,
            seed: 7,
            duration: 200.0,
            transient: 0.0,
            kind: DlcKind::Operational,
        };
        let t = TurbulenceSettings::default();
        let s = SimulationSettings::default();
        let a = case_excitation(&m, &case, &t, &s).unwrap();
        let b = case_excitation(&m, &case, &t, &s).unwrap();
        assert_eq!(a.wind, b.wind);
        assert_eq!(a.wave_force, b.wave_force);
        assert!(a.drift.iter().all(|&f| f >= 0.0));
    }
}
