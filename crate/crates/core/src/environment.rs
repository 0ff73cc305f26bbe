//! Wind and wave disturbances: the operational load-case table, JONSWAP and Kaimal
//! spectra, and seeded FFT realizations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::numerics::{linspace, trapz};

/// Frequency band [rad/s] shared by spectra, RAOs and realizations.
pub const BAND: (f64, f64) = (0.05, 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DlcKind {
    /// Power production in normal turbulence and irregular sea.
    Operational,
    /// Parked rotor in 50-year extreme conditions.
    Extreme,
}

impl DlcKind {
    pub fn label(&self) -> &'static str {
        match self {
            DlcKind::Operational => "DLC1.2",
            DlcKind::Extreme => "DLC6.1",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadCase {
    pub wind_speed: f64,
    pub hs: f64,
    pub tp: f64,
    /// Probability weight, renormalized over the operational table.
    pub weight: f64,
    #[serde(default)]
    pub seed: u64,
    /// Simulated duration including the transient [s].
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// Leading time discarded from statistics [s].
    #[serde(default = "default_transient")]
    pub transient: f64,
    #[serde(default = "default_kind")]
    pub kind: DlcKind,
}

fn default_duration() -> f64 {
    DEFAULT_DURATION
}

fn default_transient() -> f64 {
    DEFAULT_TRANSIENT
}

fn default_kind() -> DlcKind {
    DlcKind::Operational
}

impl LoadCase {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.hs >= 0.0 && self.tp > 0.0, InvalidParameter, "Hs must be non-negative and Tp positive");
        ensure!(self.wind_speed >= 0.0, InvalidParameter, "wind speed must be non-negative");
        ensure!(self.weight >= 0.0, InvalidParameter, "case weight must be non-negative");
        ensure!(
            self.duration > self.transient && self.transient >= 0.0,
            InvalidParameter,
            "duration must exceed the transient"
        );
        Ok(())
    }

    pub fn id(&self) -> String {
        format!("{}_v{:.1}_hs{:.1}_tp{:.1}", self.kind.label(), self.wind_speed, self.hs, self.tp)
    }
}

/// Wind bins: mean speed, Hs, three Tp values, raw probability [%].
pub const OPERATIONAL_BINS: [(f64, f64, [f64; 3], f64); 7] = [
    (5.0, 1.4, [5.0, 7.0, 11.0], 14.8),
    (7.1, 1.7, [5.0, 8.0, 11.0], 25.0),
    (10.3, 2.2, [5.0, 8.0, 11.0], 28.7),
    (13.9, 3.0, [7.0, 9.5, 12.0], 17.5),
    (17.9, 4.3, [7.5, 10.0, 13.0], 5.9),
    (22.1, 6.2, [10.0, 12.5, 15.0], 0.9),
    (25.0, 8.3, [10.0, 12.0, 14.0], 0.1),
];

pub const DEFAULT_DURATION: f64 = 4200.0;
pub const DEFAULT_TRANSIENT: f64 = 600.0;

/// Operational cases: 7 wind bins x 3 peak periods, each period 1/3 of its bin,
/// probabilities renormalized to 1. Seeds are `base_seed + index`.
pub fn load_case_table(base_seed: u64) -> Vec<LoadCase> {
    let total: f64 = OPERATIONAL_BINS.iter().map(|b| b.3).sum();
    let mut out = Vec::with_capacity(21);
    for (v, hs, tps, f) in OPERATIONAL_BINS {
        for tp in tps {
            out.push(LoadCase {
                wind_speed: v,
                hs,
                tp,
                weight: f / total / 3.0,
                seed: base_seed + out.len() as u64,
                duration: DEFAULT_DURATION,
                transient: DEFAULT_TRANSIENT,
                kind: DlcKind::Operational,
            });
        }
    }
    out
}

/// 50-year extreme sea state with a parked rotor.
pub fn extreme_case(seed: u64) -> LoadCase {
    LoadCase {
        wind_speed: 44.0,
        hs: 10.9,
        tp: 15.0,
        weight: 1.0,
        seed,
        duration: DEFAULT_DURATION,
        transient: DEFAULT_TRANSIENT,
        kind: DlcKind::Extreme,
    }
}

/// Peak enhancement from the `Tp / sqrt(Hs)` rule.
pub fn jonswap_gamma(hs: f64, tp: f64) -> f64 {
    let phi = tp / hs.sqrt();
    if phi <= 3.6 {
        5.0
    } else if phi >= 5.0 {
        1.0
    } else {
        (5.75 - 1.15 * phi).exp()
    }
}

fn jonswap_shape(omega: f64, tp: f64, gamma: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let wp = 2.0 * PI / tp;
    let sigma = if omega <= wp { 0.07 } else { 0.09 };
    let r = (-(omega - wp).powi(2) / (2.0 * sigma * sigma * wp * wp)).exp();
    omega.powi(-5) * (-1.25 * (wp / omega).powi(4)).exp() * gamma.powf(r)
}

/// One-sided JONSWAP elevation spectrum [m^2 s/rad], scaled so that its zeroth
/// moment over `BAND` is `Hs^2/16`; zero outside the band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSpectrum {
    pub hs: f64,
    pub tp: f64,
    pub gamma: f64,
    scale: f64,
}

impl WaveSpectrum {
    pub fn jonswap(hs: f64, tp: f64, gamma: Option<f64>) -> Result<Self> {
        ensure!(hs >= 0.0 && tp > 0.0, InvalidParameter, "Hs must be >= 0 and Tp > 0");
        let gamma = gamma.unwrap_or_else(|| jonswap_gamma(hs.max(1e-9), tp));
        ensure!(gamma >= 1.0, InvalidParameter, "peak enhancement must be >= 1");
        let w = linspace(BAND.0, BAND.1, 20001);
        let s: Vec<f64> = w.iter().map(|&x| jonswap_shape(x, tp, gamma)).collect();
        let m0 = trapz(&w, &s);
        Ok(Self {
            hs,
            tp,
            gamma,
            scale: hs * hs / 16.0 / m0,
        })
    }

    pub fn density(&self, omega: f64) -> f64 {
        if omega < BAND.0 || omega > BAND.1 {
            0.0
        } else {
            self.scale * jonswap_shape(omega, self.tp, self.gamma)
        }
    }

    pub fn on_grid(&self, omega: &[f64]) -> Vec<f64> {
        omega.iter().map(|&w| self.density(w)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TurbulenceSettings {
    /// Reference turbulence intensity of the normal turbulence model.
    pub reference_intensity: f64,
    /// Kaimal integral length [m].
    pub length_scale: f64,
    /// Amplitude of the blade-passing harmonic as a fraction of the mean wind.
    pub harmonic_3p: f64,
}

impl Default for TurbulenceSettings {
    fn default() -> Self {
        Self {
            reference_intensity: 0.12,
            length_scale: 8.1 * 42.0,
            harmonic_3p: 0.02,
        }
    }
}

impl TurbulenceSettings {
    /// Normal turbulence model standard deviation [m/s].
    pub fn sigma(&self, mean: f64) -> f64 {
        self.reference_intensity * (0.75 * mean + 5.6)
    }
}

/// Rotor-effective longitudinal wind spectrum: Kaimal point spectrum times a
/// first-order rotor-averaging admittance with corner `v/D` [Hz].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindSpectrum {
    pub mean: f64,
    pub sigma: f64,
    pub length_scale: f64,
    pub corner_hz: f64,
}

impl WindSpectrum {
    pub fn kaimal(mean: f64, sigma: f64, length_scale: f64, rotor_diameter: f64) -> Result<Self> {
        ensure!(mean > 0.0, InvalidParameter, "mean wind must be positive");
        ensure!(sigma >= 0.0, InvalidParameter, "turbulence STD must be non-negative");
        ensure!(rotor_diameter > 0.0, InvalidParameter, "rotor diameter must be positive");
        Ok(Self {
            mean,
            sigma,
            length_scale,
            corner_hz: mean / rotor_diameter,
        })
    }

    /// One-sided density [(m/s)^2 s/rad]; zero outside `BAND`.
    pub fn density(&self, omega: f64) -> f64 {
        if omega < BAND.0 || omega > BAND.1 {
            return 0.0;
        }
        let f = omega / (2.0 * PI);
        let lv = self.length_scale / self.mean;
        let point = self.sigma * self.sigma * 4.0 * lv / (1.0 + 6.0 * f * lv).powf(5.0 / 3.0);
        point / (1.0 + (f / self.corner_hz).powi(2)) / (2.0 * PI)
    }

    pub fn on_grid(&self, omega: &[f64]) -> Vec<f64> {
        omega.iter().map(|&w| self.density(w)).collect()
    }
}

/// Discrete random-phase component set on the FFT bins of a periodic record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub duration: f64,
    /// Bin indices `i` with `omega_i = i * 2 pi / duration`.
    pub bins: Vec<usize>,
    pub omegas: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
}

impl Components {
    /// Amplitudes `sqrt(2 S dw)` and ChaCha phases for every bin inside `BAND`.
    pub fn from_spectrum<F: Fn(f64) -> f64>(density: F, duration: f64, seed: u64, stream: u64) -> Self {
        let dw = 2.0 * PI / duration;
        let first = (BAND.0 / dw).ceil() as usize;
        let last = (BAND.1 / dw).floor() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut out = Components {
            duration,
            bins: Vec::new(),
            omegas: Vec::new(),
            amplitudes: Vec::new(),
            phases: Vec::new(),
        };
        for i in first.max(1)..=last {
            let w = i as f64 * dw;
            out.bins.push(i);
            out.omegas.push(w);
            out.amplitudes.push((2.0 * density(w).max(0.0) * dw).sqrt());
            out.phases.push(rng.random::<f64>() * 2.0 * PI);
        }
        out
    }

    pub fn variance(&self) -> f64 {
        self.amplitudes.iter().map(|a| 0.5 * a * a).sum()
    }

    /// Complex history `sum c_i H(w_i) exp(i(w_i t + p_i))` on `n` samples spaced
    /// `duration / n`, via one inverse FFT.
    pub fn synthesize_complex<H: Fn(f64) -> Complex64>(&self, n: usize, transfer: H) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); n];
        for (((&i, &w), &a), &p) in self.bins.iter().zip(&self.omegas).zip(&self.amplitudes).zip(&self.phases) {
            if i < n {
                buf[i] += transfer(w) * Complex64::from_polar(a, p);
            }
        }
        let fft = FftPlanner::new().plan_fft_inverse(n);
        fft.process(&mut buf);
        buf
    }

    /// Real history `sum Re(c_i H(w_i) exp(i(w_i t + p_i)))`.
    pub fn synthesize<H: Fn(f64) -> Complex64>(&self, n: usize, transfer: H) -> Vec<f64> {
        self.synthesize_complex(n, transfer).iter().map(|z| z.re).collect()
    }

    /// Number of samples for a step `dt`, checked against the highest bin.
    pub fn samples(&self, dt: f64) -> Result<usize> {
        let n = (self.duration / dt).round() as usize;
        let top = self.bins.last().copied().unwrap_or(0);
        ensure!(
            n > 2 * top,
            InvalidParameter,
            "time step {dt} s does not resolve {:.3} rad/s",
            self.omegas.last().copied().unwrap_or(0.0)
        );
        Ok(n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRealization {
    pub dt: f64,
    pub elevation: Vec<f64>,
    pub components: Components,
}

impl WaveRealization {
    pub fn times(&self) -> Vec<f64> {
        (0..self.elevation.len()).map(|i| i as f64 * self.dt).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: hullsweep/wave/v1\ntime,elevation\n");
        for (i, z) in self.elevation.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i as f64 * self.dt, z));
        }
        s
    }
}

/// Seeded wave elevation at the origin on a periodic record of `duration`.
pub fn wave_realization(spec: &WaveSpectrum, seed: u64, duration: f64, dt: f64) -> Result<WaveRealization> {
    ensure!(duration > 0.0 && dt > 0.0, InvalidParameter, "duration and dt must be positive");
    let components = Components::from_spectrum(|w| spec.density(w), duration, seed, 0);
    let n = components.samples(dt)?;
    Ok(WaveRealization {
        dt: duration / n as f64,
        elevation: components.synthesize(n, |_| Complex64::new(1.0, 0.0)),
        components,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindRealization {
    pub dt: f64,
    pub mean: f64,
    pub speed: Vec<f64>,
    pub components: Components,
    /// Blade-passing harmonic amplitude [m/s] and frequency [rad/s].
    pub harmonic: (f64, f64),
}

impl WindRealization {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: hullsweep/wind/v1\ntime,speed\n");
        for (i, v) in self.speed.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i as f64 * self.dt, v));
        }
        s
    }
}

/// Seeded rotor-effective wind plus a deterministic blade-passing harmonic at
/// `harmonic_omega` (three times the nominal rotor speed).
pub fn rotor_effective_wind(
    spec: &WindSpectrum,
    harmonic_amplitude: f64,
    harmonic_omega: f64,
    seed: u64,
    duration: f64,
    dt: f64,
) -> Result<WindRealization> {
    ensure!(duration > 0.0 && dt > 0.0, InvalidParameter, "duration and dt must be positive");
    let components = Components::from_spectrum(|w| spec.density(w), duration, seed, 1);
    let n = components.samples(dt)?;
    let dt = duration / n as f64;
    let turb = components.synthesize(n, |_| Complex64::new(1.0, 0.0));
    let speed = turb
        .iter()
        .enumerate()
        .map(|(i, u)| spec.mean + u + harmonic_amplitude * (harmonic_omega * i as f64 * dt).sin())
        .collect();
    Ok(WindRealization {
        dt,
        mean: spec.mean,
        speed,
        components,
        harmonic: (harmonic_amplitude, harmonic_omega),
    })
}
