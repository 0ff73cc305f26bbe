use std::f64::consts::PI;

use hullsweep::analysis::spectra::welch;
use hullsweep::environment::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rustfft::FftPlanner;

fn std(x: &[f64]) -> f64 {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Periodogram bin of largest power.
fn peak_bin(x: &[f64]) -> usize {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    (1..buf.len() / 2).max_by(|&a, &b| buf[a].norm().total_cmp(&buf[b].norm())).unwrap()
}

#[test]
fn realizations_reproduce_hs_and_tp() {
    let duration = 3600.0;
    for (hs, tp) in [(1.4, 5.0), (3.0, 9.5), (6.2, 12.5), (10.9, 15.0)] {
        let spec = WaveSpectrum::jonswap(hs, tp, None).unwrap();
        let r = wave_realization(&spec, 42, duration, 0.25).unwrap();
        let hs_est = 4.0 * std(&r.elevation);
        assert!((hs_est / hs - 1.0).abs() < 0.03, "Hs {hs}: {hs_est}");
        let dw = 2.0 * PI / duration;
        let wp = peak_bin(&r.elevation) as f64 * dw;
        assert!((wp - 2.0 * PI / tp).abs() <= dw, "Tp {tp}: peak at {:.3} s", 2.0 * PI / wp);
    }
}

#[test]
fn seeds_are_bit_identical() {
    let spec = WaveSpectrum::jonswap(3.0, 9.5, None).unwrap();
    let a = wave_realization(&spec, 9, 1800.0, 0.25).unwrap();
    let b = wave_realization(&spec, 9, 1800.0, 0.25).unwrap();
    assert!(a.elevation.iter().zip(&b.elevation).all(|(x, y)| x.to_bits() == y.to_bits()));
    let c = wave_realization(&spec, 10, 1800.0, 0.25).unwrap();
    assert!(a.elevation != c.elevation);
    let w = WindSpectrum::kaimal(13.9, 1.9, 340.0, 178.0).unwrap();
    let u = rotor_effective_wind(&w, 0.2, 1.5, 4, 1800.0, 0.25).unwrap();
    let v = rotor_effective_wind(&w, 0.2, 1.5, 4, 1800.0, 0.25).unwrap();
    assert!(u.speed.iter().zip(&v.speed).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn wind_psd_follows_filtered_kaimal() {
    let spec = WindSpectrum::kaimal(13.9, 1.9, 340.0, 178.0).unwrap();
    let dt = 0.5;
    let r = rotor_effective_wind(&spec, 0.0, 1.5, 3, 36000.0, dt).unwrap();
    let (w, s) = welch(&r.speed, dt, 4096).unwrap();
    for (lo, hi) in [(0.06, 0.15), (0.15, 0.4), (0.4, 1.0)] {
        let pick = |f: &dyn Fn(usize) -> f64| -> f64 {
            let idx: Vec<usize> = (0..w.len()).filter(|&i| w[i] >= lo && w[i] < hi).collect();
            idx.iter().map(|&i| f(i)).sum::<f64>() / idx.len() as f64
        };
        let est = pick(&|i| s[i]);
        let model = pick(&|i| spec.density(w[i]));
        assert!((est / model - 1.0).abs() < 0.1, "band {lo}-{hi}: {est} vs {model}");
    }
}

#[test]
fn variance_matches_spectral_moment() {
    let spec = WaveSpectrum::jonswap(4.3, 10.0, None).unwrap();
    let r = wave_realization(&spec, 5, 36000.0, 0.25).unwrap();
    let w: Vec<f64> = (0..20001).map(|i| BAND.0 + (BAND.1 - BAND.0) * i as f64 / 20000.0).collect();
    let m0: f64 = w.windows(2).map(|p| 0.5 * (p[1] - p[0]) * (spec.density(p[0]) + spec.density(p[1]))).sum();
    let var = std(&r.elevation).powi(2);
    assert!((var / m0 - 1.0).abs() < 0.03, "{var} {m0}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn elevation_scales_with_hs(hs in 0.5f64..8.0, k in 0.2f64..3.0, seed in 0u64..1000) {
        let tp = 10.0;
        // fixed gamma keeps the spectral shape
        let a = wave_realization(&WaveSpectrum::jonswap(hs, tp, Some(2.0)).unwrap(), seed, 600.0, 0.5).unwrap();
        let b = wave_realization(&WaveSpectrum::jonswap(k * hs, tp, Some(2.0)).unwrap(), seed, 600.0, 0.5).unwrap();
        for (x, y) in a.elevation.iter().zip(&b.elevation) {
            prop_assert!((k * x - y).abs() <= 1e-9 * (1.0 + y.abs()) * k.max(1.0) * hs);
        }
    }

    #[test]
    fn jonswap_zeroth_moment_is_hs_squared_over_16(hs in 0.5f64..12.0, tp in 4.0f64..18.0) {
        let spec = WaveSpectrum::jonswap(hs, tp, None).unwrap();
        let n = 40001;
        let w: Vec<f64> = (0..n).map(|i| BAND.0 + (BAND.1 - BAND.0) * i as f64 / (n - 1) as f64).collect();
        let m0: f64 = w.windows(2).map(|p| 0.5 * (p[1] - p[0]) * (spec.density(p[0]) + spec.density(p[1]))).sum();
        prop_assert!((m0 / (hs * hs / 16.0) - 1.0).abs() < 1e-3);
    }
}
