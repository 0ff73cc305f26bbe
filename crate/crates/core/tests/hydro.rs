use std::f64::consts::PI;

use hullsweep::hull::*;
use hullsweep::hydro::*;
use hullsweep::slow::mooring::MooringConfig;
use hullsweep::slow::turbine::TurbineConfig;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn designs() -> Vec<Design> {
    let basis = DesignBasis {
        mooring_vertical_load: MooringConfig::default().static_vertical_load().unwrap(),
        ..Default::default()
    };
    feasible_designs(&DesignGrid::default(), &basis, &TurbineConfig::default())
}

#[test]
fn every_design_has_a_heave_cancellation_frequency() {
    let settings = HydroSettings::default();
    for d in designs() {
        let x3 = |w: f64| excitation(&d.shape, w, settings.water_depth, 0.0).unwrap()[1].norm();
        let long = x3(0.01);
        let grid: Vec<f64> = (0..600).map(|i| 0.1 + 2.0 * i as f64 / 599.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&w| x3(w)).collect();
        let found = (1..vals.len() - 1).any(|i| vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1] && vals[i] < 0.1 * long);
        assert!(found, "{}: no cancellation below 10% of {long:.3e}", d.id);
    }
}

#[test]
fn heave_added_mass_exceeds_displacement_for_optimum() {
    let d = designs().into_iter().find(|d| d.id == "d24.0_h4.5").unwrap();
    let a = added_mass(&d.shape);
    let (v, _) = displacement(&d.shape);
    assert!(a[1][1] > RHO_WATER * v, "{} vs {}", a[1][1], RHO_WATER * v);
}

#[test]
fn borgman_matches_quadratic_dissipation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = 0.8;
    let node = drag_nodes(&designs()[0].shape, &HydroSettings::default())[0].clone();
    let c = node.quadratic_coefficient();
    let cl = node.linearized_coefficient(sigma);
    let n = 400_000;
    let (mut quad, mut lin) = (0.0, 0.0);
    for _ in 0..n / 2 {
        // Box-Muller pair
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        for v in [sigma * r * (2.0 * PI * u2).cos(), sigma * r * (2.0 * PI * u2).sin()] {
            quad += c * v * v.abs() * v;
            lin += cl * v * v;
        }
    }
    assert!((quad / lin - 1.0).abs() < 0.02, "{}", quad / lin);
}

#[test]
fn bichromatic_drift_has_difference_frequency() {
    let (w1, w2) = (0.6, 0.7);
    let record = 20.0 * 2.0 * PI / (w2 - w1);
    let n = 12800;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * record / n as f64).collect();
    let f = newman_force_series(&[1.0, 0.8], &[w1, w2], &[0.3, 1.1], &[2.0e4, 3.0e4], &times).unwrap();
    let project = |w: f64| {
        let (mut c, mut s) = (0.0, 0.0);
        for (t, v) in times.iter().zip(&f) {
            c += v * (w * t).cos();
            s += v * (w * t).sin();
        }
        2.0 * (c * c + s * s).sqrt() / times.len() as f64
    };
    let diff = project(w2 - w1);
    // 2 a1 a2 sqrt(T1 T2)
    let expected = 2.0 * 0.8 * (2.0e4f64 * 3.0e4).sqrt();
    assert!((diff / expected - 1.0).abs() < 0.01, "{diff} {expected}");
    assert!(project(w1 + w2) < 1e-6 * diff);
}

proptest! {
    #[test]
    fn keel_cd_non_increasing_in_kc(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let fit = KcFit::default();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(heave_plate_cd(hi, &fit).unwrap() <= heave_plate_cd(lo, &fit).unwrap() + 1e-12);
    }

    #[test]
    fn wave_number_solves_dispersion(w in 0.05f64..3.0, depth in 20.0f64..500.0) {
        let k = wave_number(w, depth).unwrap();
        let lhs = GRAVITY * k * (k * depth).tanh();
        prop_assert!((lhs / (w * w) - 1.0).abs() < 1e-9);
    }
}
