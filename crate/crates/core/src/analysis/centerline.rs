//! Harmonic response along the platform and tower centerline and its instantaneous
//! center of rotation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numerics::golden_section;
use crate::slow::linear::{out, LinearModel};
use crate::slow::turbine::TurbineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Wind,
    Wave,
}

impl Channel {
    pub fn label(&self) -> &'static str {
        match self {
            Channel::Wind => "wind",
            Channel::Wave => "wave",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CenterlineSettings {
    pub wave_periods: Vec<f64>,
    pub wind_periods: Vec<f64>,
    /// Elevation step of the exported grid [m].
    pub z_step: f64,
}

impl Default for CenterlineSettings {
    fn default() -> Self {
        Self {
            wave_periods: vec![5.0, 7.0, 8.5, 10.0],
            wind_periods: vec![20.0, 30.0, 40.0],
            z_step: 1.0,
        }
    }
}

/// Surge, pitch and tower-mode responses to one disturbance channel at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterlineRao {
    pub surge: Complex64,
    pub pitch: Complex64,
    pub tower: Complex64,
}

impl CenterlineRao {
    pub fn at(lin: &LinearModel, channel: Channel, omega: f64) -> Result<Self> {
        let zero = Complex64::default();
        let dist = match channel {
            Channel::Wind => [Complex64::new(1.0, 0.0), zero, zero, zero],
            Channel::Wave => {
                let f = lin.wave_force_at(omega);
                [zero, f[0], f[1], f[2]]
            }
        };
        let (_, y) = lin.respond(omega, &dist)?;
        Ok(Self {
            surge: y[out::SURGE],
            pitch: y[out::PITCH],
            tower: y[out::TOWER],
        })
    }

    /// Horizontal displacement amplitude at elevation `z`.
    pub fn amplitude(&self, z: f64, turbine: &TurbineConfig) -> f64 {
        (self.surge + self.pitch * z + self.tower * turbine.phi(z)).norm()
    }

    /// Phase of surge relative to pitch in degrees, in [0, 360).
    pub fn phase_difference(&self) -> f64 {
        (self.surge.arg() - self.pitch.arg()).to_degrees().rem_euclid(360.0)
    }
}

/// Elevation of least displacement amplitude on `[z_lo, z_hi]`: grid scan, then
/// golden-section refinement in the bracketing cells.
pub fn center_of_rotation(rao: &CenterlineRao, turbine: &TurbineConfig, z_lo: f64, z_hi: f64) -> f64 {
    let n = ((z_hi - z_lo) / 0.5).ceil().max(2.0) as usize;
    let h = (z_hi - z_lo) / n as f64;
    let f = |z: f64| rao.amplitude(z, turbine);
    let (mut best, mut fb) = (z_lo, f(z_lo));
    for i in 1..=n {
        let z = z_lo + i as f64 * h;
        let v = f(z);
        if v < fb {
            best = z;
            fb = v;
        }
    }
    let a = (best - h).max(z_lo);
    let b = (best + h).min(z_hi);
    let z = golden_section(f, a, b, 1e-6);
    if f(z) <= fb {
        z
    } else {
        best
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterlineResponse {
    pub channel: Channel,
    pub omega: Vec<f64>,
    pub z: Vec<f64>,
    /// `[frequency][elevation]`
    pub amplitude: Vec<Vec<f64>>,
    pub z_cor: Vec<f64>,
    pub phase_difference: Vec<f64>,
}

impl CenterlineResponse {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: hullsweep/centerline/v1\nchannel,omega,period,z,amplitude,z_cor\n");
        for (i, w) in self.omega.iter().enumerate() {
            for (j, z) in self.z.iter().enumerate() {
                s.push_str(&format!(
                    "{},{:.6},{:.4},{:.3},{:.6e},{:.4}\n",
                    self.channel.label(),
                    w,
                    2.0 * PI / w,
                    z,
                    self.amplitude[i][j],
                    self.z_cor[i]
                ));
            }
        }
        s
    }
}

/// Centerline amplitudes from the keel (`-draft`) to the hub.
pub fn centerline_response(
    lin: &LinearModel,
    turbine: &TurbineConfig,
    draft: f64,
    channel: Channel,
    omegas: &[f64],
    z_step: f64,
) -> Result<CenterlineResponse> {
    ensure!(z_step > 0.0, InvalidParameter, "elevation step must be positive");
    ensure!(omegas.iter().all(|w| *w > 0.0), InvalidParameter, "frequencies must be positive");
    let z_lo = -draft;
    let z_hi = turbine.hub_height;
    let nz = ((z_hi - z_lo) / z_step).ceil() as usize + 1;
    let z: Vec<f64> = (0..nz).map(|j| (z_lo + j as f64 * z_step).min(z_hi)).collect();
    let mut res = CenterlineResponse {
        channel,
        omega: omegas.to_vec(),
        z: z.clone(),
        amplitude: Vec::with_capacity(omegas.len()),
        z_cor: Vec::with_capacity(omegas.len()),
        phase_difference: Vec::with_capacity(omegas.len()),
    };
    for &w in omegas {
        let rao = CenterlineRao::at(lin, channel, w)?;
        res.amplitude.push(z.iter().map(|&zz| rao.amplitude(zz, turbine)).collect());
        res.z_cor.push(center_of_rotation(&rao, turbine, z_lo, z_hi));
        res.phase_difference.push(rao.phase_difference());
    }
    Ok(res)
}
