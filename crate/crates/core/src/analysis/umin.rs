//! Least control action that cancels a disturbance in rotor speed and tower deflection.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::centerline::Channel;
use crate::error::{ensure, Result};
use crate::numerics::{resolvent_solve, trapz};
use crate::slow::linear::{out, LinearModel};
use crate::slow::turbine::TurbineConfig;

/// Design limits that map inputs and outputs to unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UminLimits {
    /// Blade pitch [deg].
    pub max_pitch_deg: f64,
    /// Generator torque as a fraction of rated.
    pub max_torque_fraction: f64,
    /// Rotor speed as a fraction of rated.
    pub max_speed_fraction: f64,
    /// Tower-top deflection [m].
    pub max_tower_deflection: f64,
    /// Band for the averaged indicator [Hz].
    pub band_hz: (f64, f64),
}

impl Default for UminLimits {
    fn default() -> Self {
        Self {
            max_pitch_deg: 5.0,
            max_torque_fraction: 0.2,
            max_speed_fraction: 0.1,
            max_tower_deflection: 0.5,
            band_hz: (0.05, 0.15),
        }
    }
}

/// Diagonal scalings: physical = scale * normalized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    /// `[generator torque, blade pitch]`
    pub input: [f64; 2],
    /// `[rotor speed, tower deflection]`
    pub output: [f64; 2],
}

impl Scaling {
    pub fn from_limits(limits: &UminLimits, turbine: &TurbineConfig) -> Result<Self> {
        let s = Self {
            input: [
                limits.max_torque_fraction * turbine.rated_torque(),
                limits.max_pitch_deg.to_radians(),
            ],
            output: [
                limits.max_speed_fraction * turbine.rated_rotor_speed,
                limits.max_tower_deflection,
            ],
        };
        ensure!(
            s.input.iter().chain(&s.output).all(|v| *v > 0.0 && v.is_finite()),
            InvalidParameter,
            "scaling limits must be positive"
        );
        Ok(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UminResult {
    pub channel: Channel,
    pub scaling: Scaling,
    pub omega: Vec<f64>,
    pub umin: Vec<f64>,
    /// Normalized input amplitudes `[torque, pitch]`.
    pub inputs: Vec<[f64; 2]>,
    /// `sigma_min / sigma_max` of the scaled plant.
    pub conditioning: Vec<f64>,
    pub flagged: Vec<bool>,
}

/// Conditioning below which a frequency point is flagged.
pub const CONDITION_LIMIT: f64 = 1e-8;

impl UminResult {
    /// Mean over a band given in Hz.
    pub fn band_average(&self, band_hz: (f64, f64)) -> f64 {
        let (lo, hi) = (2.0 * PI * band_hz.0, 2.0 * PI * band_hz.1);
        let (w, u): (Vec<f64>, Vec<f64>) = self
            .omega
            .iter()
            .zip(&self.umin)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .map(|(w, u)| (*w, *u))
            .unzip();
        if w.len() < 2 {
            return w.first().map(|_| u[0]).unwrap_or(f64::NAN);
        }
        trapz(&w, &u) / (w[w.len() - 1] - w[0])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("# schema: hullsweep/umin/v1\nchannel,omega,umin,torque,pitch,conditioning,flagged\n");
        for i in 0..self.omega.len() {
            s.push_str(&format!(
                "{},{:.6},{:.6e},{:.6e},{:.6e},{:.3e},{}\n",
                self.channel.label(),
                self.omega[i],
                self.umin[i],
                self.inputs[i][0],
                self.inputs[i][1],
                self.conditioning[i],
                self.flagged[i]
            ));
        }
        s
    }
}

/// `u = -G^-1 g_d` for a unit disturbance, with `G` the scaled 2x2 plant from
/// (torque, pitch command) to (rotor speed, tower deflection).
pub fn invert_point(g: &Matrix2<Complex64>, gd: &Vector2<Complex64>, scaling: &Scaling) -> (Vector2<Complex64>, f64) {
    let du = Matrix2::from_diagonal(&Vector2::new(scaling.input[0], scaling.input[1]).map(|v| Complex64::new(v, 0.0)));
    let de_inv = Matrix2::from_diagonal(
        &Vector2::new(1.0 / scaling.output[0], 1.0 / scaling.output[1]).map(|v| Complex64::new(v, 0.0)),
    );
    let gs = de_inv * g * du;
    let gds = de_inv * gd;
    let sv = gs.singular_values();
    let smax = sv.max();
    let cond = if smax > 0.0 { sv.min() / smax } else { 0.0 };
    // Cramer's rule keeps the row scaling exact; the SVD only reports conditioning.
    let det = gs[(0, 0)] * gs[(1, 1)] - gs[(0, 1)] * gs[(1, 0)];
    if det.norm() == 0.0 {
        return (Vector2::zeros(), cond);
    }
    let u = Vector2::new(
        (gs[(1, 1)] * gds[0] - gs[(0, 1)] * gds[1]) / det,
        (gs[(0, 0)] * gds[1] - gs[(1, 0)] * gds[0]) / det,
    );
    (-u, cond)
}

/// Minimum-input indicator of an open-loop plant on its frequency grid.
pub fn u_min(lin: &LinearModel, scaling: &Scaling, channel: Channel) -> Result<UminResult> {
    ensure!(lin.closure.is_none(), InvalidParameter, "the indicator needs the open-loop plant");
    ensure!(lin.b.ncols() == 2, InvalidParameter, "plant must have two inputs");
    let cc = lin.c.map(|v| Complex64::new(v, 0.0));
    let bb = lin.b.map(|v| Complex64::new(v, 0.0));
    let bdc = lin.bd.map(|v| Complex64::new(v, 0.0));
    let rows = [out::OMEGA, out::TOWER];
    let mut res = UminResult {
        channel,
        scaling: *scaling,
        omega: lin.omega.clone(),
        umin: Vec::with_capacity(lin.omega.len()),
        inputs: Vec::with_capacity(lin.omega.len()),
        conditioning: Vec::with_capacity(lin.omega.len()),
        flagged: Vec::with_capacity(lin.omega.len()),
    };
    for (i, &w) in lin.omega.iter().enumerate() {
        let zero = Complex64::default();
        let dist = match channel {
            Channel::Wind => [Complex64::new(1.0, 0.0), zero, zero, zero],
            Channel::Wave => {
                let f = lin.wave_force[i];
                [zero, f[0], f[1], f[2]]
            }
        };
        let dcol = &bdc * DMatrix::from_column_slice(4, 1, &dist);
        let mut rhs = DMatrix::<Complex64>::zeros(lin.a.nrows(), 3);
        rhs.columns_mut(0, 2).copy_from(&bb);
        rhs.column_mut(2).copy_from(&dcol.column(0));
        let x = resolvent_solve(&lin.a, w, &rhs)?;
        let y = &cc * x;
        let mut g = Matrix2::<Complex64>::zeros();
        let mut gd = Vector2::<Complex64>::zeros();
        for (r, &row) in rows.iter().enumerate() {
            for j in 0..2 {
                g[(r, j)] = y[(row, j)] + Complex64::new(lin.d[(row, j)], 0.0);
            }
            let mut v = y[(row, 2)];
            for (k, d) in dist.iter().enumerate() {
                v += lin.dd[(row, k)] * d;
            }
            gd[r] = v;
        }
        let (u, cond) = invert_point(&g, &gd, scaling);
        res.umin.push(u.norm());
        res.inputs.push([u[0].norm(), u[1].norm()]);
        res.conditioning.push(cond);
        res.flagged.push(cond < CONDITION_LIMIT);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Scaling {
        Scaling {
            input: [1.0, 1.0],
            output: [1.0, 1.0],
        }
    }

    #[test]
    fn identity_plant() {
        let g = Matrix2::identity();
        let gd = Vector2::new(Complex64::new(1.0, 0.0), Complex64::default());
        let (u, cond) = invert_point(&g, &gd, &unit());
        assert!((u.norm() - 1.0).abs() < 1e-14);
        assert!((cond - 1.0).abs() < 1e-14);
        let (u0, _) = invert_point(&g, &Vector2::zeros(), &unit());
        assert_eq!(u0.norm(), 0.0);
    }

    #[test]
    fn output_scaling_cancels() {
        let g = Matrix2::new(
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.2, 0.1),
            Complex64::new(0.3, -0.7),
            Complex64::new(2.0, 0.0),
        );
        let gd = Vector2::new(Complex64::new(0.4, 0.1), Complex64::new(-1.0, 0.3));
        let a = invert_point(&g, &gd, &unit()).0.norm();
        let s = Scaling {
            input: [1.0, 1.0],
            output: [13.0, 0.002],
        };
        let b = invert_point(&g, &gd, &s).0.norm();
        assert!((a - b).abs() <= 1e-13 * a, "{a} {b}");
        let t = Scaling {
            input: [2.0, 2.0],
            output: [1.0, 1.0],
        };
        let c = invert_point(&g, &gd, &t).0.norm();
        assert!((c - 0.5 * a).abs() <= 1e-13 * a);
    }
}
