//! Rainflow counting, spectral (Dirlik) fatigue and damage-equivalent loads.

use std::f64::consts::PI;

use puruspe::gamma;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numerics::trapz;

/// Seconds in the reference lifetime of 20 years.
pub const LIFETIME: f64 = 20.0 * 365.25 * 24.0 * 3600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FatigueSettings {
    /// Wöhler exponent.
    pub wohler: f64,
    /// Reference cycle count over the lifetime.
    pub reference_cycles: f64,
    pub lifetime: f64,
}

impl Default for FatigueSettings {
    fn default() -> Self {
        Self {
            wohler: 4.0,
            reference_cycles: 1e7,
            lifetime: LIFETIME,
        }
    }
}

impl FatigueSettings {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.wohler > 0.0, InvalidParameter, "Wöhler exponent must be positive");
        ensure!(self.reference_cycles > 0.0, InvalidParameter, "reference cycle count must be positive");
        ensure!(self.lifetime > 0.0, InvalidParameter, "lifetime must be positive");
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cycle {
    pub range: f64,
    pub mean: f64,
    /// 1 for a closed cycle, 0.5 for a residue half cycle.
    pub count: f64,
}

/// Local extrema of a series, endpoints included; flat runs collapse to one point.
pub fn turning_points(x: &[f64]) -> Vec<f64> {
    let mut tp: Vec<f64> = Vec::with_capacity(x.len() / 2 + 2);
    for &v in x {
        match tp.len() {
            0 => tp.push(v),
            1 => {
                if v != tp[0] {
                    tp.push(v);
                }
            }
            n => {
                let a = tp[n - 2];
                let b = tp[n - 1];
                if v == b {
                    continue;
                }
                if (b - a) * (v - b) > 0.0 {
                    tp[n - 1] = v;
                } else {
                    tp.push(v);
                }
            }
        }
    }
    tp
}

/// Four-point rainflow counting; the residue is counted as half cycles.
pub fn rainflow(x: &[f64]) -> Vec<Cycle> {
    let mut cycles = Vec::new();
    let mut stack: Vec<f64> = Vec::new();
    for p in turning_points(x) {
        stack.push(p);
        while stack.len() >= 4 {
            let n = stack.len();
            let (a, b, c, d) = (stack[n - 4], stack[n - 3], stack[n - 2], stack[n - 1]);
            let inner = (b - c).abs();
            if inner <= (a - b).abs() && inner <= (c - d).abs() {
                cycles.push(Cycle {
                    range: inner,
                    mean: 0.5 * (b + c),
                    count: 1.0,
                });
                stack.drain(n - 3..n - 1);
            } else {
                break;
            }
        }
    }
    for w in stack.windows(2) {
        cycles.push(Cycle {
            range: (w[1] - w[0]).abs(),
            mean: 0.5 * (w[0] + w[1]),
            count: 0.5,
        });
    }
    cycles
}

/// `(sum n R^m / n_ref)^(1/m)` with every count multiplied by `scale`.
pub fn del_from_cycles(cycles: &[Cycle], m: f64, n_ref: f64, scale: f64) -> f64 {
    let s: f64 = cycles.iter().map(|c| c.count * c.range.powf(m)).sum();
    (scale * s / n_ref).powf(1.0 / m)
}

/// Rainflow DEL of a history of length `duration`, extrapolated to the lifetime share `weight`.
pub fn rainflow_del(x: &[f64], duration: f64, weight: f64, settings: &FatigueSettings) -> Result<f64> {
    settings.validate()?;
    ensure!(duration > 0.0, InvalidParameter, "duration must be positive");
    let scale = weight * settings.lifetime / duration;
    Ok(del_from_cycles(&rainflow(x), settings.wohler, settings.reference_cycles, scale))
}

/// Spectral moments `lambda_k = int w^k S(w) dw` for k = 0, 1, 2, 4.
pub fn spectral_moments(omega: &[f64], psd: &[f64]) -> [f64; 4] {
    let m = |k: i32| -> f64 {
        let y: Vec<f64> = omega.iter().zip(psd).map(|(w, s)| w.powi(k) * s).collect();
        trapz(omega, &y)
    };
    [m(0), m(1), m(2), m(4)]
}

/// Dirlik range distribution: expected peak rate [1/s] and `E[S^m]`.
pub fn dirlik_moment(omega: &[f64], psd: &[f64], m: f64) -> Result<(f64, f64)> {
    ensure!(omega.len() == psd.len(), InvalidParameter, "grid and density differ in length");
    ensure!(psd.iter().all(|s| *s >= 0.0), InvalidParameter, "negative spectral density");
    let [l0, l1, l2, l4] = spectral_moments(omega, psd);
    if l0 <= 0.0 || l2 <= 0.0 || l4 <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let peaks = (l4 / l2).sqrt() / (2.0 * PI);
    let xm = l1 / l0 * (l2 / l4).sqrt();
    let g = l2 / (l0 * l4).sqrt();
    let d1 = 2.0 * (xm - g * g) / (1.0 + g * g);
    let r = (g - xm - d1 * d1) / (1.0 - g - d1 + d1 * d1);
    let d2 = (1.0 - g - d1 + d1 * d1) / (1.0 - r);
    let d3 = 1.0 - d1 - d2;
    let q = 1.25 * (g - d3 - d2 * r) / d1;
    let scale = 2.0 * l0.sqrt();
    let e = scale.powf(m)
        * (d1 * q.powf(m) * gamma(1.0 + m)
            + 2f64.powf(0.5 * m) * gamma(1.0 + 0.5 * m) * (d2 * r.abs().powf(m) + d3));
    ensure!(e.is_finite(), Numerical, "Dirlik moment is not finite");
    Ok((peaks, e))
}

/// Dirlik DEL of a one-sided density per rad/s for a case carrying lifetime share `weight`.
pub fn spectral_del(omega: &[f64], psd: &[f64], weight: f64, settings: &FatigueSettings) -> Result<f64> {
    settings.validate()?;
    let (peaks, e) = dirlik_moment(omega, psd, settings.wohler)?;
    let cycles = peaks * settings.lifetime * weight;
    Ok((cycles * e / settings.reference_cycles).powf(1.0 / settings.wohler))
}

/// Narrow-band (Rayleigh) DEL for comparison with the Dirlik value.
pub fn rayleigh_del(omega: &[f64], psd: &[f64], weight: f64, settings: &FatigueSettings) -> f64 {
    let [l0, _, l2, _] = spectral_moments(omega, psd);
    if l0 <= 0.0 {
        return 0.0;
    }
    let m = settings.wohler;
    let rate = (l2 / l0).sqrt() / (2.0 * PI);
    let e = (2.0 * (2.0 * l0).sqrt()).powf(m) * gamma(1.0 + 0.5 * m);
    (rate * settings.lifetime * weight * e / settings.reference_cycles).powf(1.0 / m)
}

/// Combine per-case DELs that already carry their lifetime share.
pub fn combine_del(dels: &[f64], m: f64) -> f64 {
    dels.iter().map(|d| d.powf(m)).sum::<f64>().powf(1.0 / m)
}

/// Probability-weighted RMS of per-case STDs.
pub fn combine_std(weighted: &[(f64, f64)]) -> f64 {
    let wsum: f64 = weighted.iter().map(|(w, _)| w).sum();
    if wsum <= 0.0 {
        return 0.0;
    }
    (weighted.iter().map(|(w, s)| w * s * s).sum::<f64>() / wsum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn turning_points_drop_monotone_runs() {
        let tp = turning_points(&[0.0, 1.0, 2.0, 2.0, 1.0, -1.0, 0.0, 3.0]);
        assert_eq!(tp, vec![0.0, 2.0, -1.0, 3.0]);
    }

    #[test]
    fn textbook_sequence() {
        // -2 1 -3 5 -1 3 -4 4 -2: the (-1, 3) cycle closes, the rest is residue
        let c = rainflow(&[-2.0, 1.0, -3.0, 5.0, -1.0, 3.0, -4.0, 4.0, -2.0]);
        let full: Vec<_> = c.iter().filter(|c| c.count == 1.0).collect();
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].range, 4.0);
        let total: f64 = c.iter().map(|c| c.count * c.range).sum();
        // residue -2 1 -3 5 -4 4 -2: ranges 3 4 8 9 8 6 at half weight
        assert!((total - (4.0 + 0.5 * 38.0)).abs() < 1e-12);
    }

    #[test]
    fn sinusoid_del_is_its_range() {
        let n = 50;
        let x: Vec<f64> = (0..=n * 40).map(|i| 3.0 * (2.0 * PI * i as f64 / 40.0).cos()).collect();
        let c = rainflow(&x);
        let d = del_from_cycles(&c, 4.0, n as f64, 1.0);
        assert!((d - 6.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn zero_density_gives_zero_del() {
        let w = [0.1, 0.2, 0.3];
        let d = spectral_del(&w, &[0.0; 3], 1.0, &FatigueSettings::default()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn narrow_band_dirlik_matches_rayleigh() {
        let w: Vec<f64> = (0..2001).map(|i| 0.9 + 0.2 * i as f64 / 2000.0).collect();
        let s: Vec<f64> = w.iter().map(|x| (-((x - 1.0) / 0.005).powi(2)).exp()).collect();
        let f = FatigueSettings::default();
        let a = spectral_del(&w, &s, 1.0, &f).unwrap();
        let b = rayleigh_del(&w, &s, 1.0, &f);
        assert!((a / b - 1.0).abs() < 0.02, "{a} {b}");
    }

    #[test]
    fn weights_combine() {
        assert!((combine_del(&[2.0], 4.0) - 2.0).abs() < 1e-12);
        assert!((combine_std(&[(0.5, 1.0), (0.5, 1.0)]) - 1.0).abs() < 1e-12);
        let a = combine_del(&[1.0, 2.0, 3.0], 4.0);
        let b = combine_del(&[3.0, 1.0, 2.0], 4.0);
        assert!((a - b).abs() < 1e-12);
    }
}
