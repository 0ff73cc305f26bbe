//! Nonlinear simulation against the linearized model.

use std::f64::consts::PI;

use hullsweep::control::*;
use hullsweep::environment::{load_case_table, LoadCase};
use hullsweep::hull::*;
use hullsweep::hydro::wave_number;
use hullsweep::slow::linear::{out, LinearModel};
use hullsweep::slow::model::{Excitation, NonlinearModel, Region};
use hullsweep::slow::simulate::{ch, integrate, simulate_case, SimulationSettings};
use hullsweep::sweep::SweepSettings;
use nalgebra::DVector;
use num_complex::Complex64;

fn model(d: f64) -> NonlinearModel {
    let s = SweepSettings::default();
    let basis = s.resolved_basis().unwrap();
    let design = solve_draft_for_c55(ShapeParams::new(d, 4.5).unwrap(), basis.c55_target, &basis, &s.turbine).unwrap();
    s.model(&design).unwrap()
}

/// Amplitude of the `w` component of a uniformly sampled record.
fn harmonic(x: &[f64], dt: f64, w: f64) -> f64 {
    let (mut c, mut s) = (0.0, 0.0);
    for (i, v) in x.iter().enumerate() {
        let t = i as f64 * dt;
        c += v * (w * t).cos();
        s += v * (w * t).sin();
    }
    2.0 * (c * c + s * s).sqrt() / x.len() as f64
}

/// Regular wave of amplitude `a` on a record of whole periods.
fn regular_wave(m: &NonlinearModel, wind: f64, a: f64, w: f64, periods: usize, half: f64) -> Excitation {
    let duration = periods as f64 * 2.0 * PI / w;
    let n = (duration / half).round() as usize;
    let h = duration / n as f64;
    let mut env = Excitation::steady(wind, h, n, m.nodes.len());
    let depth = m.hydro.water_depth;
    let k = wave_number(w, depth).unwrap();
    let x = m.hydro.excitation_at(w);
    for i in 0..n {
        let e = Complex64::from_polar(a, w * i as f64 * h);
        for j in 0..3 {
            env.wave_force[j][i] = (x[j] * e).re;
        }
        for (nv, node) in env.node_velocity.iter_mut().zip(&m.nodes) {
            nv[i] = (node.water_velocity(w, k, depth, m.hydro.heading) * e).re;
        }
        env.elevation[i] = e.re;
    }
    env
}

#[test]
fn small_regular_wave_matches_linear_rao() {
    let mut m = model(20.0);
    let gains = ControllerGains::from_turbine(&m.turbine);
    let op = m.operating_point(8.0).unwrap();
    let sigma = vec![0.0; m.nodes.len()];
    let lin = LinearModel::linearize(&m, &op, &sigma)
        .unwrap()
        .close(&gains, TuningTargets::default().filter_omega())
        .unwrap();
    let a = 0.05;
    for period in [8.0, 12.0] {
        let w = 2.0 * PI / period;
        let env = regular_wave(&m, 8.0, a, w, 80, 0.025);
        let transient = 40.0 * period;
        let x0 = m.initial_state(&op);
        let ts = integrate(&mut m, x0, &env, &gains, op.region, &SimulationSettings::default(), transient).unwrap();
        let x = lin.wave_force_at(w);
        let (_, y) = lin.respond(w, &[Complex64::default(), x[0] * a, x[1] * a, x[2] * a]).unwrap();
        for (c, o) in [(ch::PITCH, out::PITCH), (ch::SURGE, out::SURGE), (ch::TOWER, out::TOWER)] {
            let nl = harmonic(&ts.columns[c], ts.dt, w);
            let li = y[o].norm();
            assert!((nl / li - 1.0).abs() < 0.1, "T {period} channel {c}: {nl:.4e} vs {li:.4e}");
        }
    }
}

#[test]
fn halving_the_step_barely_changes_statistics() {
    let mut m = model(24.0);
    let mut case = load_case_table(3)[10].clone();
    case.duration = 1800.0;
    case.transient = 300.0;
    let gains = ControllerGains::from_turbine(&m.turbine);
    let cc = fixed_point_solve(&mut m, &case, &gains, &TuningTargets::default(), &Default::default(), &Default::default()).unwrap();
    let g = gains.with_point(cc.gains.unwrap());
    let run = |m: &mut NonlinearModel, dt: f64| {
        let s = SimulationSettings { dt, ..Default::default() };
        simulate_case(m, &case, &g, &Default::default(), &s).unwrap().1
    };
    let a = run(&mut m, 0.05);
    let b = run(&mut m, 0.025);
    let std = |x: &[f64]| {
        let mu = x.iter().sum::<f64>() / x.len() as f64;
        (x.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
    };
    for c in [ch::PITCH, ch::TOWER, ch::ROTOR, ch::MYT] {
        let (sa, sb) = (std(&a.columns[c]), std(&b.columns[c]));
        assert!((sa / sb - 1.0).abs() < 0.01, "channel {c}: {sa} vs {sb}");
    }
}

/// RK4 of the linear model under a constant disturbance, returning outputs at every step.
fn linear_step(lin: &LinearModel, dist: &[f64; 4], dt: f64, steps: usize) -> Vec<DVector<f64>> {
    let n = lin.states();
    let d = DVector::from_column_slice(dist);
    let f = |x: &DVector<f64>| &lin.a * x + &lin.bd * &d;
    let mut x = DVector::zeros(n);
    let mut ys = Vec::with_capacity(steps);
    for _ in 0..steps {
        ys.push(&lin.c * &x + &lin.dd * &d);
        let k1 = f(&x);
        let k2 = f(&(&x + &k1 * (0.5 * dt)));
        let k3 = f(&(&x + &k2 * (0.5 * dt)));
        let k4 = f(&(&x + &k3 * dt));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    ys
}

#[test]
fn wind_step_linear_and_nonlinear_agree() {
    let mut m = model(24.0);
    let v = 13.9;
    let base = ControllerGains::from_turbine(&m.turbine);
    let case = load_case_table(1).into_iter().find(|c| c.wind_speed == v).unwrap();
    let cc = fixed_point_solve(&mut m, &case, &base, &TuningTargets::default(), &Default::default(), &Default::default()).unwrap();
    let gains = base.with_point(cc.gains.unwrap());
    let op = m.operating_point(v).unwrap();
    let sigma = vec![0.0; m.nodes.len()];
    let lin = LinearModel::linearize(&m, &op, &sigma).unwrap().close(&gains, TuningTargets::default().filter_omega()).unwrap();
    let dt = 0.05;
    let steps = 2000;
    let env = Excitation::steady(v + 0.1, 0.5 * dt, 2 * steps + 2, m.nodes.len());
    let x0 = m.initial_state(&op);
    let ts = integrate(&mut m, x0, &env, &gains, op.region, &SimulationSettings::default(), 0.0).unwrap();
    let ys = linear_step(&lin, &[0.1, 0.0, 0.0, 0.0], dt, steps);
    for (c, o, mean) in [(ch::PITCH, out::PITCH, op.q[2]), (ch::ROTOR, out::OMEGA, op.rotor_speed), (ch::TOWER, out::TOWER, op.q[3])] {
        let nl: Vec<f64> = ts.columns[c].iter().take(steps).map(|x| x - mean).collect();
        let li: Vec<f64> = ys.iter().map(|y| y[o]).collect();
        let peak = li.iter().fold(0.0f64, |p, v| p.max(v.abs()));
        let err = nl.iter().zip(&li).fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
        assert!(err < 0.05 * peak, "channel {c}: error {err:.3e} against peak {peak:.3e}");
    }
}

#[test]
fn aggressive_pitch_gains_destabilize_platform() {
    let mut m = model(20.0);
    let op = m.operating_point(17.9).unwrap();
    assert_eq!(op.region, Region::AboveRated);
    let case = load_case_table(1).into_iter().find(|c| c.wind_speed == 17.9).unwrap();
    let base = ControllerGains::from_turbine(&m.turbine);
    let cc = fixed_point_solve(&mut m, &case, &base, &TuningTargets::default(), &Default::default(), &Default::default()).unwrap();
    let plant = LinearModel::linearize(&m, &op, &cc.sigma).unwrap();
    let t = &m.turbine;
    let closed = |w_reg: f64| {
        let (kp, ki) = pole_placement(plant.slopes.dq_dpitch, t.drivetrain_inertia, w_reg, 0.7).unwrap();
        plant.close(&ControllerGains::fixed(t, kp, ki), TuningTargets::default().filter_omega()).unwrap()
    };
    // a regulator below the platform pitch mode is stable, an onshore-style one is not
    assert!(closed(2.0 * PI * 0.01).stability_margin() < 0.0);
    assert!(closed(2.0 * PI * 0.1).stability_margin() > 0.0);
}

#[test]
fn keel_drag_falls_with_wave_height() {
    let mut m = model(20.0);
    let base = ControllerGains::from_turbine(&m.turbine);
    let mk = |hs: f64| LoadCase { hs, ..load_case_table(1)[7].clone() };
    let mut cds = Vec::new();
    for hs in [1.0, 2.2, 4.0, 7.0, 11.0] {
        let cc = fixed_point_solve(&mut m, &mk(hs), &base, &TuningTargets::default(), &Default::default(), &Default::default()).unwrap();
        assert!(cc.converged);
        cds.push(cc.cd);
    }
    let keel: Vec<usize> = (0..m.nodes.len()).filter(|&n| m.nodes[n].kind == hullsweep::hydro::NodeKind::Keel).collect();
    // small seas sit on the upper clip of the fit
    for &n in &keel {
        let seq: Vec<f64> = cds.iter().map(|c| c[n]).collect();
        assert!(seq.windows(2).all(|w| w[1] <= w[0]), "node {n}: {seq:?}");
    }
    assert!(keel.iter().any(|&n| cds[cds.len() - 1][n] < cds[0][n]));
}
