//! Disturbance and response spectra on the shared frequency grid, and Welch estimates
//! of simulated histories.

use std::f64::consts::PI;

use rustfft::FftPlanner;
use num_complex::Complex64;
use serde::Serialize;

use crate::environment::{LoadCase, TurbulenceSettings, WaveSpectrum, WindSpectrum};
use crate::error::{ensure, Result};
use crate::hydro::newman_force_spectrum;
use crate::numerics::trapz;
use crate::slow::linear::{Transfer, OUTPUTS};

/// One-sided disturbance densities of a load case on the model grid.
#[derive(Debug, Clone, Serialize)]
pub struct CaseSpectra {
    pub omega: Vec<f64>,
    pub wave: Vec<f64>,
    pub wind: Vec<f64>,
    pub drift_force: Vec<f64>,
}

impl CaseSpectra {
    pub fn for_case(
        case: &LoadCase,
        turbulence: &TurbulenceSettings,
        rotor_diameter: f64,
        omega: &[f64],
        drift: &[f64],
    ) -> Result<Self> {
        let wave = WaveSpectrum::jonswap(case.hs, case.tp, None)?.on_grid(omega);
        let wind = if case.wind_speed > 0.0 {
            WindSpectrum::kaimal(
                case.wind_speed,
                turbulence.sigma(case.wind_speed),
                turbulence.length_scale,
                rotor_diameter,
            )?
            .on_grid(omega)
        } else {
            vec![0.0; omega.len()]
        };
        let drift_force = newman_force_spectrum(omega, &wave, drift, omega)?;
        Ok(Self {
            omega: omega.to_vec(),
            wave,
            wind,
            drift_force,
        })
    }

    pub fn calm(omega: &[f64]) -> Self {
        let z = vec![0.0; omega.len()];
        Self {
            omega: omega.to_vec(),
            wave: z.clone(),
            wind: z.clone(),
            drift_force: z,
        }
    }
}

/// Output densities split by channel.
#[derive(Debug, Clone, Serialize)]
pub struct OutputSpectra {
    pub omega: Vec<f64>,
    /// `[output][frequency]`
    pub wind: Vec<Vec<f64>>,
    pub wave: Vec<Vec<f64>>,
    pub drift: Vec<Vec<f64>>,
}

impl OutputSpectra {
    pub fn total(&self, output: usize) -> Vec<f64> {
        (0..self.omega.len())
            .map(|i| self.wind[output][i] + self.wave[output][i] + self.drift[output][i])
            .collect()
    }

    pub fn std(&self, output: usize) -> f64 {
        trapz(&self.omega, &self.total(output)).max(0.0).sqrt()
    }

    pub fn stds(&self) -> Vec<f64> {
        (0..self.wind.len()).map(|k| self.std(k)).collect()
    }
}

pub fn output_spectra(tr: &Transfer, cs: &CaseSpectra) -> OutputSpectra {
    let ny = OUTPUTS.len();
    let ng = tr.omega.len();
    let mut out = OutputSpectra {
        omega: tr.omega.clone(),
        wind: vec![vec![0.0; ng]; ny],
        wave: vec![vec![0.0; ng]; ny],
        drift: vec![vec![0.0; ng]; ny],
    };
    for i in 0..ng {
        for k in 0..ny {
            out.wind[k][i] = tr.wind[i][k].norm_sqr() * cs.wind[i];
            out.wave[k][i] = tr.wave[i][k].norm_sqr() * cs.wave[i];
            out.drift[k][i] = tr.surge_force[i][k].norm_sqr() * cs.drift_force[i];
        }
    }
    out
}

/// Relative velocity STD at every drag node.
pub fn node_sigmas(tr: &Transfer, cs: &CaseSpectra) -> Vec<f64> {
    let nn = tr.node_wave.first().map(|v| v.len()).unwrap_or(0);
    (0..nn)
        .map(|n| {
            let s: Vec<f64> = (0..tr.omega.len())
                .map(|i| {
                    tr.node_wind[i][n].norm_sqr() * cs.wind[i]
                        + tr.node_wave[i][n].norm_sqr() * cs.wave[i]
                        + tr.node_force[i][n].norm_sqr() * cs.drift_force[i]
                })
                .collect();
            trapz(&tr.omega, &s).max(0.0).sqrt()
        })
        .collect()
}

/// Welch one-sided density per rad/s with Hann windows and 50% overlap.
/// Returns `(omega, density)`.
pub fn welch(x: &[f64], dt: f64, segment: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure!(dt > 0.0, InvalidParameter, "time step must be positive");
    ensure!(segment >= 8, InvalidParameter, "segment too short");
    ensure!(x.len() >= segment, InvalidParameter, "series shorter than one segment");
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let win: Vec<f64> = (0..segment)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / segment as f64).cos())
        .collect();
    let u: f64 = win.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment);
    let step = segment / 2;
    let nf = segment / 2 + 1;
    let mut acc = vec![0.0; nf];
    let mut count = 0usize;
    let mut start = 0;
    let mut buf = vec![Complex64::default(); segment];
    while start + segment <= x.len() {
        for i in 0..segment {
            buf[i] = Complex64::new((x[start + i] - mean) * win[i], 0.0);
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
        count += 1;
        start += step;
    }
    let fs = 1.0 / dt;
    // density per Hz, then per rad/s
    let scale = 1.0 / (fs * u * count as f64) / (2.0 * PI);
    let dw = 2.0 * PI * fs / segment as f64;
    let omega = (0..nf).map(|k| k as f64 * dw).collect();
    let psd = acc
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let one_sided = if k == 0 || (segment % 2 == 0 && k == nf - 1) { 1.0 } else { 2.0 };
            a * scale * one_sided
        })
        .collect();
    Ok((omega, psd))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_preserves_variance() {
        let dt = 0.1;
        let x: Vec<f64> = (0..20000)
            .map(|i| {
                let t = i as f64 * dt;
                2.0 * (0.7 * t).sin() + 0.5 * (2.3 * t + 1.0).cos()
            })
            .collect();
        let (w, s) = welch(&x, dt, 2048).unwrap();
        let var = trapz(&w, &s);
        let expect = 0.5 * 4.0 + 0.5 * 0.25;
        assert!((var - expect).abs() < 0.03 * expect, "{var} vs {expect}");
    }

    #[test]
    fn welch_peak_at_tone() {
        let dt = 0.05;
        let x: Vec<f64> = (0..40000).map(|i| (1.2 * i as f64 * dt).sin()).collect();
        let (w, s) = welch(&x, dt, 4096).unwrap();
        let (imax, _) = s.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        assert!((w[imax] - 1.2).abs() < 2.0 * (w[1] - w[0]));
    }
}
