//! Quasi-static catenary mooring, projected onto the planar surge/heave/pitch motion.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MooringLine {
    /// Plan-view azimuth of the line measured from the downwind x-axis [rad].
    pub azimuth: f64,
    pub unstretched_length: f64,
    /// Submerged weight per unit length [N/m].
    pub weight_per_length: f64,
    /// Axial stiffness EA [N].
    pub axial_stiffness: f64,
    pub anchor_radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MooringConfig {
    pub lines: Vec<MooringLine>,
    pub fairlead_radius: f64,
    pub fairlead_elevation: f64,
    pub water_depth: f64,
}

impl Default for MooringConfig {
    fn default() -> Self {
        let line = |azimuth: f64| MooringLine {
            azimuth,
            unstretched_length: 610.0,
            weight_per_length: 1100.0,
            axial_stiffness: 7.5e8,
            anchor_radius: 600.0,
        };
        Self {
            // one downwind line, two upwind lines 120 deg apart
            lines: vec![line(0.0), line(2.0 * PI / 3.0), line(4.0 * PI / 3.0)],
            fairlead_radius: 26.0,
            fairlead_elevation: 8.7,
            water_depth: 130.0,
        }
    }
}

/// Fairlead tension components of a single line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineTension {
    pub horizontal: f64,
    pub vertical: f64,
}

/// Planar generalized mooring load on (surge, heave, pitch) about the SWL reference point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarLoad {
    pub surge: f64,
    pub heave: f64,
    pub pitch: f64,
}

/// Elastic catenary with frictionless seabed contact. Solves the fairlead tension
/// `(H, V)` for a horizontal span `x_span` and vertical span `z_span`.
pub fn solve_catenary(
    x_span: f64,
    z_span: f64,
    length: f64,
    w: f64,
    ea: f64,
    guess: Option<LineTension>,
) -> Result<LineTension> {
    ensure!(
        x_span > 0.0 && z_span > 0.0 && length > 0.0 && w > 0.0 && ea > 0.0,
        InvalidParameter,
        "catenary inputs must be positive (x = {x_span}, z = {z_span})"
    );
    let (mut h, mut v) = match guess {
        Some(g) if g.horizontal > 0.0 && g.vertical > 0.0 => (g.horizontal, g.vertical),
        _ => {
            let chord = (x_span * x_span + z_span * z_span).sqrt();
            let lambda = if length <= chord {
                0.2
            } else {
                (3.0 * ((length * length - z_span * z_span) / (x_span * x_span) - 1.0)).sqrt()
            };
            let h0 = (w * x_span / (2.0 * lambda)).abs().max(1.0);
            let v0 = 0.5 * w * (z_span / lambda.tanh() + length);
            (h0, v0.max(1.0))
        }
    };
    for _ in 0..100 {
        let (fx, fz, j) = catenary_residual(h, v, x_span, z_span, length, w, ea);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !det.is_finite() || det.abs() < 1e-300 {
            break;
        }
        let dh = (j[1][1] * fx - j[0][1] * fz) / det;
        let dv = (-j[1][0] * fx + j[0][0] * fz) / det;
        // keep both tensions positive
        let mut step = 1.0;
        while (h - step * dh <= 0.0 || v - step * dv <= 0.0) && step > 1e-6 {
            step *= 0.5;
        }
        h -= step * dh;
        v -= step * dv;
        if (fx.abs() < 1e-8 * x_span.max(1.0) && fz.abs() < 1e-8 * z_span.max(1.0))
            || (dh.abs() < 1e-10 * h && dv.abs() < 1e-10 * v)
        {
            return Ok(LineTension {
                horizontal: h,
                vertical: v,
            });
        }
    }
    Err(Error::NonConvergence(format!(
        "catenary solve failed (x = {x_span:.3}, z = {z_span:.3}, H = {h:.3e}, V = {v:.3e})"
    )))
}

/// Span residuals and their Jacobian w.r.t. (H, V).
fn catenary_residual(
    h: f64,
    v: f64,
    x_span: f64,
    z_span: f64,
    l: f64,
    w: f64,
    ea: f64,
) -> (f64, f64, [[f64; 2]; 2]) {
    let vh = v / h;
    let s = (1.0 + vh * vh).sqrt();
    if v >= w * l {
        // fully suspended
        let va = v - w * l;
        let vah = va / h;
        let sa = (1.0 + vah * vah).sqrt();
        let x = h / w * (vh.asinh() - vah.asinh()) + h * l / ea;
        let z = h / w * (s - sa) + (v * l - 0.5 * w * l * l) / ea;
        let dxdh = (vh.asinh() - vah.asinh()) / w - (vh / s - vah / sa) / w + l / ea;
        let dxdv = (1.0 / s - 1.0 / sa) / w;
        let dzdh = (s - sa) / w - (vh * vh / s - vah * vah / sa) / w;
        let dzdv = (vh / s - vah / sa) / w + l / ea;
        (x - x_span, z - z_span, [[dxdh, dxdv], [dzdh, dzdv]])
    } else {
        let x = l - v / w + h / w * vh.asinh() + h * l / ea;
        let z = h / w * (s - 1.0) + v * v / (2.0 * ea * w);
        let dxdh = vh.asinh() / w - vh / (w * s) + l / ea;
        let dxdv = -1.0 / w + 1.0 / (w * s);
        let dzdh = (s - 1.0) / w - vh * vh / (w * s);
        let dzdv = vh / (w * s) + v / (ea * w);
        (x - x_span, z - z_span, [[dxdh, dxdv], [dzdh, dzdv]])
    }
}

impl MooringConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.lines.is_empty(), InvalidParameter, "no mooring lines");
        for l in &self.lines {
            ensure!(
                l.anchor_radius > self.fairlead_radius,
                InvalidParameter,
                "anchor inside fairlead radius"
            );
        }
        Ok(())
    }

    fn line_tensions(
        &self,
        surge: f64,
        heave: f64,
        pitch: f64,
        guesses: Option<&[LineTension]>,
    ) -> Result<Vec<(LineTension, [f64; 2], [f64; 3])>> {
        let (sb, cb) = pitch.sin_cos();
        let zf = self.fairlead_elevation;
        self.lines
            .iter()
            .enumerate()
            .map(|(i, line)| {
                let (sa, ca) = line.azimuth.sin_cos();
                let xf = self.fairlead_radius * ca;
                let yf = self.fairlead_radius * sa;
                // lever arm of the fairlead from the displaced reference point
                let lever_x = xf * cb + zf * sb;
                let lever_z = -xf * sb + zf * cb;
                let px = surge + lever_x;
                let pz = heave + lever_z;
                let dx = line.anchor_radius * ca - px;
                let dy = line.anchor_radius * sa - yf;
                let x_span = (dx * dx + dy * dy).sqrt();
                let z_span = pz + self.water_depth;
                let guess = guesses.and_then(|g| g.get(i)).copied();
                let t = solve_catenary(
                    x_span,
                    z_span,
                    line.unstretched_length,
                    line.weight_per_length,
                    line.axial_stiffness,
                    guess,
                )?;
                Ok((t, [lever_x, lever_z], [dx / x_span, dy / x_span, 0.0]))
            })
            .collect()
    }

    /// Net planar mooring load for a platform displacement.
    pub fn planar_load(&self, surge: f64, heave: f64, pitch: f64) -> Result<PlanarLoad> {
        self.planar_load_warm(surge, heave, pitch, &mut Vec::new())
    }

    /// As [`planar_load`](Self::planar_load), reusing and updating per-line tension guesses.
    pub fn planar_load_warm(
        &self,
        surge: f64,
        heave: f64,
        pitch: f64,
        cache: &mut Vec<LineTension>,
    ) -> Result<PlanarLoad> {
        let guesses = if cache.len() == self.lines.len() {
            Some(cache.as_slice())
        } else {
            None
        };
        let lines = self.line_tensions(surge, heave, pitch, guesses)?;
        cache.clear();
        let mut load = PlanarLoad::default();
        for (t, lever, dir) in lines {
            let fx = t.horizontal * dir[0];
            let fz = -t.vertical;
            load.surge += fx;
            load.heave += fz;
            load.pitch += lever[1] * fx - lever[0] * fz;
            cache.push(t);
        }
        Ok(load)
    }

    /// Total vertical fairlead load at zero displacement [N].
    pub fn static_vertical_load(&self) -> Result<f64> {
        Ok(-self.planar_load(0.0, 0.0, 0.0)?.heave)
    }

    /// Fairlead tensions at zero displacement.
    pub fn pretension(&self) -> Result<Vec<LineTension>> {
        Ok(self
            .line_tensions(0.0, 0.0, 0.0, None)?
            .into_iter()
            .map(|(t, _, _)| t)
            .collect())
    }

    /// 3x3 stiffness about a displaced state by central differences.
    pub fn stiffness(&self, surge: f64, heave: f64, pitch: f64) -> Result<[[f64; 3]; 3]> {
        let steps = [0.1, 0.05, 1e-3];
        let x0 = [surge, heave, pitch];
        let mut k = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[j] += steps[j];
            xm[j] -= steps[j];
            let fp = self.planar_load(xp[0], xp[1], xp[2])?;
            let fm = self.planar_load(xm[0], xm[1], xm[2])?;
            let df = [fp.surge - fm.surge, fp.heave - fm.heave, fp.pitch - fm.pitch];
            for i in 0..3 {
                k[i][j] = -df[i] / (2.0 * steps[j]);
            }
        }
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inextensible_suspended_catenary_closed_form() {
        // choose H, V and compute spans from the closed form; solver must recover them
        let (w, l, ea): (f64, f64, f64) = (1000.0, 300.0, 1e15);
        let (h, v): (f64, f64) = (2.0e5, 4.0e5);
        let va = v - w * l;
        let x = h / w * ((v / h).asinh() - (va / h).asinh());
        let z = h / w * ((1.0 + (v / h).powi(2)).sqrt() - (1.0 + (va / h).powi(2)).sqrt());
        let t = solve_catenary(x, z, l, w, ea, None).unwrap();
        assert!((t.horizontal - h).abs() / h < 1e-6);
        assert!((t.vertical - v).abs() / v < 1e-6);
    }

    #[test]
    fn seabed_contact_vertical_equals_suspended_weight() {
        let cfg = MooringConfig::default();
        let pre = cfg.pretension().unwrap();
        for t in &pre {
            assert!(t.horizontal > 0.0 && t.vertical > 0.0);
            assert!(t.vertical < 1100.0 * 610.0);
        }
    }

    #[test]
    fn zero_offset_has_no_net_horizontal_load() {
        let cfg = MooringConfig::default();
        let f = cfg.planar_load(0.0, 0.0, 0.0).unwrap();
        let pre = cfg.pretension().unwrap();
        assert!(f.surge.abs() < 1e-6 * pre[0].horizontal);
        assert!(f.pitch.abs() < 1e-6 * pre[0].vertical * 26.0);
        assert!(f.heave < 0.0);
    }

    #[test]
    fn surge_offset_is_restored() {
        let cfg = MooringConfig::default();
        let f = cfg.planar_load(5.0, 0.0, 0.0).unwrap();
        assert!(f.surge < 0.0);
        let f = cfg.planar_load(-5.0, 0.0, 0.0).unwrap();
        assert!(f.surge > 0.0);
    }

    #[test]
    fn stiffness_matches_refined_difference() {
        let cfg = MooringConfig::default();
        let k = cfg.stiffness(0.0, 0.0, 0.0).unwrap();
        let h = 0.01;
        let fp = cfg.planar_load(h, 0.0, 0.0).unwrap().surge;
        let fm = cfg.planar_load(-h, 0.0, 0.0).unwrap().surge;
        let k11 = -(fp - fm) / (2.0 * h);
        assert!((k[0][0] - k11).abs() / k11 < 0.01, "{} vs {}", k[0][0], k11);
        assert!(k[0][0] > 0.0);
    }
}
