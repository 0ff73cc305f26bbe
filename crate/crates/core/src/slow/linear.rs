//! State-space linearization about an operating point and frequency-domain transfer functions.

use nalgebra::{DMatrix, DVector, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::control::ControllerGains;
use crate::error::{Error, Result};
use crate::hydro::wave_number;
use crate::numerics::interp1;
use crate::slow::model::{NonlinearModel, OperatingPoint, Region};

pub const OUTPUTS: [&str; 8] = [
    "rotor_speed",
    "tower_deflection",
    "tower_base_moment",
    "power",
    "tower_top_acceleration",
    "platform_pitch",
    "platform_surge",
    "blade_pitch",
];
pub const INPUTS: [&str; 2] = ["generator_torque", "pitch_command"];
pub const DISTURBANCES: [&str; 4] = ["wind", "surge_force", "heave_force", "pitch_force"];

pub mod out {
    pub const OMEGA: usize = 0;
    pub const TOWER: usize = 1;
    pub const MYT: usize = 2;
    pub const POWER: usize = 3;
    pub const ACC: usize = 4;
    pub const PITCH: usize = 5;
    pub const SURGE: usize = 6;
    pub const BLADE: usize = 7;
}

/// Plant state count: `[q, q_dot, Omega, theta]`.
pub const PLANT_STATES: usize = 10;

/// Output values at an operating point, ordered as `OUTPUTS`.
pub fn steady_outputs(model: &NonlinearModel, op: &OperatingPoint) -> [f64; 8] {
    let s = &model.structure;
    [
        op.rotor_speed,
        op.q[3],
        s.tower_base_moment(op.q[2], op.q[3]),
        op.electrical_power(model.turbine.generator_efficiency),
        0.0,
        op.q[2],
        op.q[0],
        op.pitch,
    ]
}

/// Central-difference rotor slopes at an operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AeroSlopes {
    pub dt_dv: f64,
    pub dt_domega: f64,
    pub dt_dpitch: f64,
    pub dq_dv: f64,
    pub dq_domega: f64,
    pub dq_dpitch: f64,
}

/// Difference steps for wind speed, rotor speed and pitch.
pub const SLOPE_STEPS: (f64, f64, f64) = (0.5, 0.01, 0.5 * std::f64::consts::PI / 180.0);

pub fn aero_slopes(model: &NonlinearModel, op: &OperatingPoint, steps: (f64, f64, f64)) -> Result<AeroSlopes> {
    if op.region == Region::Parked {
        let c = model.turbine.air_density * model.turbine.swept_area() * model.parked.drag_coefficient;
        return Ok(AeroSlopes {
            dt_dv: c * op.wind_speed.abs(),
            dt_domega: 0.0,
            dt_dpitch: 0.0,
            dq_dv: 0.0,
            dq_domega: 0.0,
            dq_dpitch: 0.0,
        });
    }
    let t = &model.turbine;
    let (v, w, th) = (op.wind_speed, op.rotor_speed, op.pitch);
    let (hv, hw, ht) = steps;
    let f = |v: f64, w: f64, th: f64| t.aero_forces(v, w, th).map(|a| (a.thrust, a.torque));
    let d = |a: (f64, f64), b: (f64, f64), h: f64| ((a.0 - b.0) / (2.0 * h), (a.1 - b.1) / (2.0 * h));
    let sv = d(f(v + hv, w, th)?, f(v - hv, w, th)?, hv);
    let sw = d(f(v, w + hw, th)?, f(v, w - hw, th)?, hw);
    let st = d(f(v, w, th + ht)?, f(v, w, th - ht)?, ht);
    Ok(AeroSlopes {
        dt_dv: sv.0,
        dt_domega: sw.0,
        dt_dpitch: st.0,
        dq_dv: sv.1,
        dq_domega: sw.1,
        dq_dpitch: st.1,
    })
}

/// Closed-loop controller description attached to a linear model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoopClosure {
    pub region: Region,
    pub kp: f64,
    pub ki: f64,
    pub torque_gain: f64,
    pub filter_omega: f64,
}

#[derive(Debug, Clone)]
pub struct LinearModel {
    pub operating_point: OperatingPoint,
    pub slopes: AeroSlopes,
    pub a: DMatrix<f64>,
    /// Inputs `[M_g, theta_cmd]` added to the controller commands.
    pub b: DMatrix<f64>,
    /// Disturbances `[v0, F_surge, F_heave, F_pitch]`.
    pub bd: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub dd: DMatrix<f64>,
    /// Borgman coefficient per drag node.
    pub node_damping: Vec<f64>,
    pub node_levers: Vec<[f64; 3]>,
    /// Horizontal tower-top displacement map over the structural DOFs.
    pub tower_top: [f64; 4],
    /// Shared frequency grid [rad/s].
    pub omega: Vec<f64>,
    /// Generalized wave force per unit amplitude, drag excitation included.
    pub wave_force: Vec<[Complex64; 3]>,
    /// Undisturbed water velocity per unit amplitude, per frequency and node.
    pub node_water: Vec<Vec<Complex64>>,
    pub drift: Vec<f64>,
    pub closure: Option<LoopClosure>,
}

/// Transfer functions of every output on the grid, per disturbance channel.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub omega: Vec<f64>,
    /// Outputs per unit wind speed.
    pub wind: Vec<DVector<Complex64>>,
    /// Outputs per unit wave amplitude.
    pub wave: Vec<DVector<Complex64>>,
    /// Outputs per unit surge force (slow drift).
    pub surge_force: Vec<DVector<Complex64>>,
    /// Relative node velocity per unit wind, wave amplitude and surge force.
    pub node_wind: Vec<Vec<Complex64>>,
    pub node_wave: Vec<Vec<Complex64>>,
    pub node_force: Vec<Vec<Complex64>>,
}

impl LinearModel {
    /// Open-loop plant about `op` with Borgman drag from node velocity STDs `sigma`.
    pub fn linearize(model: &NonlinearModel, op: &OperatingPoint, sigma: &[f64]) -> Result<Self> {
        if sigma.len() != model.nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} node STDs for {} nodes",
                sigma.len(),
                model.nodes.len()
            )));
        }
        let s = &model.structure;
        let t = &model.turbine;
        let slopes = aero_slopes(model, op, SLOPE_STEPS)?;
        let node_damping: Vec<f64> = model
            .nodes
            .iter()
            .zip(sigma)
            .map(|(n, &sg)| n.linearized_coefficient(sg))
            .collect();
        let node_levers: Vec<[f64; 3]> = model.nodes.iter().map(|n| n.lever()).collect();

        let mut damp = s.damping + s.hub * s.hub.transpose() * slopes.dt_dv;
        for (l, &bn) in node_levers.iter().zip(&node_damping) {
            let lv = Vector4::new(l[0], l[1], l[2], 0.0);
            damp += lv * lv.transpose() * bn;
        }
        let stiff = s.stiffness + model.mooring_stiffness(&op.q)?;
        let minv = s.mass_inv;

        let n = PLANT_STATES;
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, 2);
        let mut bd = DMatrix::zeros(n, 4);
        for i in 0..4 {
            a[(i, 4 + i)] = 1.0;
        }
        let ak = -minv * stiff;
        let ad = -minv * damp;
        let hub_acc = minv * s.hub;
        for i in 0..4 {
            for j in 0..4 {
                a[(4 + i, j)] = ak[(i, j)];
                a[(4 + i, 4 + j)] = ad[(i, j)];
            }
            a[(4 + i, 8)] = hub_acc[i] * slopes.dt_domega;
            a[(4 + i, 9)] = hub_acc[i] * slopes.dt_dpitch;
            bd[(4 + i, 0)] = hub_acc[i] * slopes.dt_dv;
            for j in 0..3 {
                bd[(4 + i, 1 + j)] = minv[(i, j)];
            }
        }
        if op.region != Region::Parked {
            let j = t.drivetrain_inertia;
            for k in 0..4 {
                a[(8, 4 + k)] = -slopes.dq_dv * s.hub[k] / j;
            }
            a[(8, 8)] = slopes.dq_domega / j;
            a[(8, 9)] = slopes.dq_dpitch / j;
            a[(9, 9)] = -1.0 / t.actuator_time_constant;
            b[(8, 0)] = -1.0 / j;
            b[(9, 1)] = 1.0 / t.actuator_time_constant;
            bd[(8, 0)] = slopes.dq_dv / j;
        }

        let ny = OUTPUTS.len();
        let mut c = DMatrix::zeros(ny, n);
        let mut d = DMatrix::zeros(ny, 2);
        let mut dd = DMatrix::zeros(ny, 4);
        c[(out::OMEGA, 8)] = 1.0;
        c[(out::TOWER, 3)] = 1.0;
        let myt = s.tower_base_moment_row();
        for k in 0..4 {
            c[(out::MYT, k)] = myt[k];
        }
        let eta = t.generator_efficiency;
        c[(out::POWER, 8)] = eta * op.generator_torque;
        d[(out::POWER, 0)] = eta * op.rotor_speed;
        for k in 0..4 {
            let tt = s.tower_top[k];
            for col in 0..n {
                c[(out::ACC, col)] += tt * a[(4 + k, col)];
            }
            for col in 0..4 {
                dd[(out::ACC, col)] += tt * bd[(4 + k, col)];
            }
            for col in 0..2 {
                d[(out::ACC, col)] += tt * b[(4 + k, col)];
            }
        }
        c[(out::PITCH, 2)] = 1.0;
        c[(out::SURGE, 0)] = 1.0;
        c[(out::BLADE, 9)] = 1.0;

        let hydro = &model.hydro;
        let depth = hydro.water_depth;
        let mut wave_force = Vec::with_capacity(hydro.omega.len());
        let mut node_water = Vec::with_capacity(hydro.omega.len());
        for (i, &w) in hydro.omega.iter().enumerate() {
            let k = wave_number(w, depth)?;
            let mut f = hydro.force[i];
            let mut uw = Vec::with_capacity(model.nodes.len());
            for ((node, l), &bn) in model.nodes.iter().zip(&node_levers).zip(&node_damping) {
                let u = node.water_velocity(w, k, depth, hydro.heading);
                for m in 0..3 {
                    f[m] += u * (bn * l[m]);
                }
                uw.push(u);
            }
            wave_force.push(f);
            node_water.push(uw);
        }

        Ok(Self {
            operating_point: *op,
            slopes,
            a,
            b,
            bd,
            c,
            d,
            dd,
            node_damping,
            node_levers,
            tower_top: [s.tower_top[0], s.tower_top[1], s.tower_top[2], s.tower_top[3]],
            omega: hydro.omega.clone(),
            wave_force,
            node_water,
            drift: hydro.drift.clone(),
            closure: None,
        })
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    /// Closed loop with the region's control law: PI pitch plus speed filter above rated,
    /// filtered `K Omega^2` torque below rated. Parked plants are returned unchanged.
    pub fn close(&self, gains: &ControllerGains, filter_omega: f64) -> Result<Self> {
        if self.closure.is_some() {
            return Err(Error::InvalidParameter("loop already closed".into()));
        }
        let op = &self.operating_point;
        let region = op.region;
        if region == Region::Parked {
            return Ok(self.clone());
        }
        let extra = if region == Region::AboveRated { 2 } else { 1 };
        let n0 = self.states();
        let n = n0 + extra;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n0, n0)).copy_from(&self.a);
        let mut b = DMatrix::zeros(n, 2);
        b.view_mut((0, 0), (n0, 2)).copy_from(&self.b);
        let mut bd = DMatrix::zeros(n, 4);
        bd.view_mut((0, 0), (n0, 4)).copy_from(&self.bd);
        let mut c = DMatrix::zeros(self.c.nrows(), n);
        c.view_mut((0, 0), (self.c.nrows(), n0)).copy_from(&self.c);

        let f = n0;
        a[(f, 8)] = filter_omega;
        a[(f, f)] = -filter_omega;
        let (kp, ki) = gains.gains_at_wind(op.wind_speed);
        let tau_inv = -self.a[(9, 9)];
        let j_inv = -self.b[(8, 0)];
        let mut torque_gain = 0.0;
        if region == Region::AboveRated {
            a[(9, f)] += kp * tau_inv;
            a[(9, f + 1)] += tau_inv;
            a[(f + 1, f)] = ki;
        } else {
            torque_gain = 2.0 * gains.torque_constant * op.rotor_speed;
            a[(8, f)] -= torque_gain * j_inv;
            // power follows the torque command through the direct term
            c[(out::POWER, f)] += self.d[(out::POWER, 0)] * torque_gain;
        }
        for col in 0..n {
            let mut acc = 0.0;
            for k in 0..4 {
                acc += self.tower_top[k] * a[(4 + k, col)];
            }
            c[(out::ACC, col)] = acc;
        }
        Ok(Self {
            a,
            b,
            bd,
            c,
            closure: Some(LoopClosure {
                region,
                kp: if region == Region::AboveRated { kp } else { 0.0 },
                ki: if region == Region::AboveRated { ki } else { 0.0 },
                torque_gain,
                filter_omega,
            }),
            ..self.clone()
        })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.a.complex_eigenvalues().iter().copied().collect()
    }

    /// Largest real part over the spectrum of `A`.
    pub fn stability_margin(&self) -> f64 {
        self.eigenvalues().iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Wave force per unit amplitude at `omega`, linearly interpolated on the grid.
    pub fn wave_force_at(&self, omega: f64) -> [Complex64; 3] {
        let mut out = [Complex64::default(); 3];
        if omega < self.omega[0] || omega > *self.omega.last().unwrap() {
            return out;
        }
        for (m, o) in out.iter_mut().enumerate() {
            let re: Vec<f64> = self.wave_force.iter().map(|f| f[m].re).collect();
            let im: Vec<f64> = self.wave_force.iter().map(|f| f[m].im).collect();
            *o = Complex64::new(interp1(&self.omega, &re, omega), interp1(&self.omega, &im, omega));
        }
        out
    }

    /// Response of states and outputs to a disturbance vector at one frequency.
    pub fn respond(&self, omega: f64, dist: &[Complex64; 4]) -> Result<(DVector<Complex64>, DVector<Complex64>)> {
        let rhs = self.bd.map(|v| Complex64::new(v, 0.0)) * DVector::from_column_slice(dist);
        let x = self.solve(omega, &DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()))?;
        let x = x.column(0).into_owned();
        let y = self.c.map(|v| Complex64::new(v, 0.0)) * &x
            + self.dd.map(|v| Complex64::new(v, 0.0)) * DVector::from_column_slice(dist);
        Ok((x, y))
    }

    fn solve(&self, omega: f64, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        crate::numerics::resolvent_solve(&self.a, omega, rhs)
    }

    /// Relative velocity of each node for a state response and the wave kinematics at grid point `i`.
    fn node_velocity(&self, x: &DVector<Complex64>, water: Option<&[Complex64]>) -> Vec<Complex64> {
        self.node_levers
            .iter()
            .enumerate()
            .map(|(n, l)| {
                let body = x[4] * l[0] + x[5] * l[1] + x[6] * l[2];
                water.map(|w| w[n]).unwrap_or_default() - body
            })
            .collect()
    }

    /// Transfer functions of all outputs and node velocities on the grid.
    pub fn transfer(&self) -> Result<Transfer> {
        let ng = self.omega.len();
        let ns = self.states();
        let cc = self.c.map(|v| Complex64::new(v, 0.0));
        let ddc = self.dd.map(|v| Complex64::new(v, 0.0));
        let bdc = self.bd.map(|v| Complex64::new(v, 0.0));
        let mut tr = Transfer {
            omega: self.omega.clone(),
            wind: Vec::with_capacity(ng),
            wave: Vec::with_capacity(ng),
            surge_force: Vec::with_capacity(ng),
            node_wind: Vec::with_capacity(ng),
            node_wave: Vec::with_capacity(ng),
            node_force: Vec::with_capacity(ng),
        };
        for (i, &w) in self.omega.iter().enumerate() {
            let f = self.wave_force[i];
            let dists = DMatrix::from_column_slice(
                4,
                3,
                &[
                    Complex64::new(1.0, 0.0),
                    Complex64::default(),
                    Complex64::default(),
                    Complex64::default(),
                    Complex64::default(),
                    f[0],
                    f[1],
                    f[2],
                    Complex64::default(),
                    Complex64::new(1.0, 0.0),
                    Complex64::default(),
                    Complex64::default(),
                ],
            );
            let rhs = &bdc * &dists;
            let x = self.solve(w, &rhs)?;
            let y = &cc * &x + &ddc * &dists;
            let col = |m: &DMatrix<Complex64>, j: usize| -> DVector<Complex64> { m.column(j).into_owned() };
            let xs: Vec<DVector<Complex64>> = (0..3).map(|j| col(&x, j)).collect();
            debug_assert_eq!(xs[0].len(), ns);
            tr.wind.push(col(&y, 0));
            tr.wave.push(col(&y, 1));
            tr.surge_force.push(col(&y, 2));
            tr.node_wind.push(self.node_velocity(&xs[0], None));
            tr.node_wave.push(self.node_velocity(&xs[1], Some(&self.node_water[i])));
            tr.node_force.push(self.node_velocity(&xs[2], None));
        }
        Ok(tr)
    }

    /// JSON record of the matrices for external tools.
    pub fn to_json(&self) -> Result<String> {
        let m = |x: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect()
        };
        let v = serde_json::json!({
            "schema": "hullsweep/linear/v1",
            "operating_point": self.operating_point,
            "slopes": self.slopes,
            "closure": self.closure,
            "inputs": INPUTS,
            "disturbances": DISTURBANCES,
            "outputs": OUTPUTS,
            "a": m(&self.a),
            "b": m(&self.b),
            "bd": m(&self.bd),
            "c": m(&self.c),
            "d": m(&self.d),
            "dd": m(&self.dd),
        });
        Ok(serde_json::to_string_pretty(&v)?)
    }
}
