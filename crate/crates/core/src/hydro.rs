//! Slender-body hydrodynamics of the three-column hull: zero-frequency added mass,
//! first-order wave excitation (Froude-Krylov pressure with MacCamy-Fuchs diffraction
//! on the vertical cylinders), Morison drag nodes and slow-drift forcing.
//!
//! Convention: waves travel in +x, `zeta(x, t) = Re(A exp(i(w t - k x)))`, and a force
//! RAO `X` produces `F(t) = Re(X A exp(i w t))` for unit elevation at the origin.
//! Generalized coordinates are surge, heave and pitch about the SWL centerline point,
//! pitch positive for a downwind tower tilt (`dx = z beta`, `dz = -x beta`).

use std::f64::consts::PI;

use num_complex::Complex64;
use puruspe::{Jn, Yn};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::hull::{HullShape, GRAVITY, RHO_WATER};
use crate::numerics::{gauss_legendre, linspace};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KcFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for KcFit {
    fn default() -> Self {
        Self {
            a: 5.0,
            b: 0.4,
            c: 1.5,
            min: 1.5,
            max: 15.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HydroSettings {
    pub water_depth: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
    /// Wave propagation direction [rad], 0 = downwind (+x).
    pub heading: f64,
    pub column_cd: f64,
    pub strips_per_column: usize,
    pub kc_fit: KcFit,
    /// Tabulated mean-drift coefficients `(omega, T_c)`; the reflection heuristic
    /// is used when empty.
    pub drift_table: Vec<(f64, f64)>,
}

impl Default for HydroSettings {
    fn default() -> Self {
        Self {
            water_depth: 130.0,
            omega_min: 0.05,
            omega_max: 3.0,
            n_omega: 600,
            heading: 0.0,
            column_cd: 0.4,
            strips_per_column: 10,
            kc_fit: KcFit::default(),
            drift_table: Vec::new(),
        }
    }
}

impl HydroSettings {
    pub fn omega_grid(&self) -> Vec<f64> {
        linspace(self.omega_min, self.omega_max, self.n_omega)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.water_depth > 0.0, InvalidParameter, "water depth must be positive");
        ensure!(
            self.omega_min > 0.0 && self.omega_max > self.omega_min && self.n_omega >= 2,
            InvalidParameter,
            "invalid frequency grid"
        );
        ensure!(self.strips_per_column >= 1, InvalidParameter, "need at least one strip");
        ensure!(self.column_cd >= 0.0, InvalidParameter, "negative drag coefficient");
        ensure!(
            self.drift_table.iter().all(|&(_, t)| t >= 0.0),
            InvalidParameter,
            "drift coefficients must be non-negative"
        );
        Ok(())
    }
}

/// Linear dispersion `w^2 = g k tanh(k h)` solved for `k`.
pub fn wave_number(omega: f64, depth: f64) -> Result<f64> {
    ensure!(omega > 0.0, InvalidParameter, "frequency must be positive, got {omega}");
    let deep = omega * omega / GRAVITY;
    if deep * depth > 20.0 {
        return Ok(deep);
    }
    let mut k = deep.max(omega / (GRAVITY * depth).sqrt());
    for _ in 0..50 {
        let th = (k * depth).tanh();
        let f = GRAVITY * k * th - omega * omega;
        let df = GRAVITY * (th + k * depth * (1.0 - th * th));
        let dk = f / df;
        k -= dk;
        if dk.abs() < 1e-14 * k {
            break;
        }
    }
    Ok(k)
}

/// `cosh(k(z+h))/cosh(kh)` and `sinh(k(z+h))/cosh(kh)`, overflow-free.
fn depth_factors(k: f64, z: f64, depth: f64) -> (f64, f64) {
    let e1 = (k * z).exp();
    let e2 = (-k * (z + 2.0 * depth)).exp();
    let den = 1.0 + (-2.0 * k * depth).exp();
    ((e1 + e2) / den, (e1 - e2) / den)
}

/// Undisturbed wave kinematics per unit amplitude at a point.
#[derive(Debug, Clone, Copy)]
pub struct WavePoint {
    pub pressure: Complex64,
    pub u: Complex64,
    pub w: Complex64,
}

pub fn wave_point(omega: f64, k: f64, depth: f64, x: f64, z: f64) -> WavePoint {
    let (ch, sh) = depth_factors(k, z.min(0.0), depth);
    let phase = Complex64::from_polar(1.0, -k * x);
    let coth = 1.0 / (k * depth).tanh();
    WavePoint {
        pressure: phase * RHO_WATER * GRAVITY * ch,
        u: phase * omega * ch * coth,
        w: phase * I * omega * sh * coth,
    }
}

/// MacCamy-Fuchs horizontal force per unit length and unit amplitude at a cylinder
/// centered on the origin, without the depth factor.
fn maccamy_fuchs(k: f64, radius: f64) -> Complex64 {
    let x = k * radius;
    let j1p = Jn(0, x) - Jn(1, x) / x;
    let y1p = Yn(0, x) - Yn(1, x) / x;
    4.0 * RHO_WATER * GRAVITY / k * Complex64::new(j1p, y1p) / (j1p * j1p + y1p * y1p)
}

/// Plan-view average of `exp(-i k x)` over a disk of radius `r`.
fn disk_average(k: f64, r: f64) -> f64 {
    let x = k * r;
    if x < 1e-8 {
        1.0
    } else {
        2.0 * Jn(1, x) / x
    }
}

/// Complex excitation `[surge, heave, pitch]` per unit wave amplitude.
pub fn excitation(shape: &HullShape, omega: f64, depth: f64, heading: f64) -> Result<[Complex64; 3]> {
    ensure!(omega > 0.0, InvalidParameter, "frequency must be positive, got {omega}");
    let k = wave_number(omega, depth)?;
    let (ch_dir, sh_dir) = (heading.cos(), heading.sin());
    let r = shape.column_radius;
    let rp = shape.plate_radius;
    let t = shape.draft;
    let z_top = shape.plate_top();
    let mf_col = maccamy_fuchs(k, r);
    let mf_plate = maccamy_fuchs(k, rp);
    let ch = |z: f64| depth_factors(k, z, depth).0;
    // depth integrals of the horizontal line force and its moment about the SWL
    let col_f: f64 = gauss_legendre(ch, z_top, 0.0, 4);
    let col_m: f64 = gauss_legendre(|z| z * ch(z), z_top, 0.0, 4);
    let band_f: f64 = gauss_legendre(ch, -t, z_top, 2);
    let band_m: f64 = gauss_legendre(|z| z * ch(z), -t, z_top, 2);
    let fx_local = mf_col * col_f + mf_plate * band_f;
    let mx_local = mf_col * col_m + mf_plate * band_m;
    let rho_g = RHO_WATER * GRAVITY;
    let fk_z = rho_g
        * (ch(-t) * PI * rp * rp * disk_average(k, rp)
            - ch(z_top) * PI * (rp * rp * disk_average(k, rp) - r * r * disk_average(k, r)));
    // plate added mass driven by the vertical fluid acceleration at mid-plate
    let z_mid = 0.5 * (z_top - t);
    let (_, sh_mid) = depth_factors(k, z_mid, depth);
    let accel = -omega * omega * sh_mid / (k * depth).tanh() * disk_average(k, rp);
    let fz_local = fk_z + plate_heave_added_mass(shape) * accel;

    let mut out = [Complex64::default(); 3];
    for c in &shape.columns {
        let along = c[0] * ch_dir + c[1] * sh_dir;
        let phase = Complex64::from_polar(1.0, -k * along);
        let fx = phase * fx_local * ch_dir;
        let fz = phase * fz_local;
        out[0] += fx;
        out[1] += fz;
        out[2] += phase * mx_local * ch_dir - fz * c[0];
    }
    Ok(out)
}

/// Mean drift coefficient heuristic `T_c = 0.5 rho g (6 r) R^2`, with a reflection
/// coefficient shape `R^2 = (kr)^2 / (1 + (kr)^2)`.
pub fn drift_heuristic(shape: &HullShape, omega: f64, depth: f64) -> Result<f64> {
    let k = wave_number(omega, depth)?;
    let kr2 = (k * shape.column_radius).powi(2);
    Ok(0.5 * RHO_WATER * GRAVITY * 6.0 * shape.column_radius * kr2 / (1.0 + kr2))
}

/// Heave added mass of one plate: a thin disk less the column footprint.
fn plate_heave_added_mass(shape: &HullShape) -> f64 {
    let (r, rp) = (shape.column_radius, shape.plate_radius);
    (8.0 / 3.0 * RHO_WATER * rp.powi(3) - 4.0 / 3.0 * RHO_WATER * r.powi(3)).max(0.0)
}

/// Zero-frequency added mass over surge/heave/pitch about the SWL point.
pub fn added_mass(shape: &HullShape) -> [[f64; 3]; 3] {
    let r = shape.column_radius;
    let rp = shape.plate_radius;
    let t = shape.draft;
    let zt = shape.plate_top();
    // strip integrals of rho pi R^2 times 1, z, z^2
    let strip = |radius: f64, z0: f64, z1: f64| {
        let a = RHO_WATER * PI * radius * radius;
        (
            a * (z1 - z0),
            a * 0.5 * (z1 * z1 - z0 * z0),
            a * (z1.powi(3) - z0.powi(3)) / 3.0,
        )
    };
    let (c0, c1, c2) = strip(r, zt, 0.0);
    let (b0, b1, b2) = strip(rp, -t, zt);
    let a33_plate = plate_heave_added_mass(shape);
    let mut a = [[0.0; 3]; 3];
    for c in &shape.columns {
        a[0][0] += c0 + b0;
        a[0][2] += c1 + b1;
        a[1][1] += a33_plate;
        a[1][2] -= c[0] * a33_plate;
        a[2][2] += c2 + b2 + c[0] * c[0] * a33_plate;
    }
    a[2][0] = a[0][2];
    a[2][1] = a[1][2];
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DragDirection {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Column,
    PlateEdge,
    Keel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DragNode {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub direction: DragDirection,
    pub kind: NodeKind,
    pub area: f64,
    /// Significant length for the KC number [m].
    pub diameter: f64,
    pub cd: f64,
}

impl DragNode {
    /// Generalized-force map `[surge, heave, pitch]` of a unit force along the node direction;
    /// also the node velocity per unit generalized velocity.
    pub fn lever(&self) -> [f64; 3] {
        match self.direction {
            DragDirection::Horizontal => [1.0, 0.0, self.z],
            DragDirection::Vertical => [0.0, 1.0, -self.x],
        }
    }

    /// Quadratic drag coefficient `0.5 rho Cd A`.
    pub fn quadratic_coefficient(&self) -> f64 {
        0.5 * RHO_WATER * self.cd * self.area
    }

    /// Borgman linear coefficient for a Gaussian relative velocity of STD `sigma`.
    pub fn linearized_coefficient(&self, sigma: f64) -> f64 {
        (8.0 / PI).sqrt() * sigma * self.quadratic_coefficient()
    }

    /// Undisturbed water velocity along the node direction per unit amplitude.
    pub fn water_velocity(&self, omega: f64, k: f64, depth: f64, heading: f64) -> Complex64 {
        let along = self.x * heading.cos() + self.y * heading.sin();
        let p = wave_point(omega, k, depth, along, self.z);
        match self.direction {
            DragDirection::Horizontal => p.u * heading.cos(),
            DragDirection::Vertical => p.w,
        }
    }
}

/// Heave-plate drag coefficient as a function of the KC number.
pub fn heave_plate_cd(kc: f64, fit: &KcFit) -> Result<f64> {
    ensure!(kc >= 0.0 && kc.is_finite(), InvalidParameter, "KC must be non-negative, got {kc}");
    if kc == 0.0 {
        return Ok(fit.max);
    }
    Ok((fit.a * kc.powf(-fit.b) + fit.c).clamp(fit.min, fit.max))
}

/// Keulegan-Carpenter number `v T / D`.
pub fn keulegan_carpenter(velocity: f64, period: f64, diameter: f64) -> f64 {
    velocity.abs() * period / diameter
}

/// Morison drag nodes: vertical strips along each column and plate edge (horizontal
/// drag) and one keel node per heave plate (vertical drag).
pub fn drag_nodes(shape: &HullShape, settings: &HydroSettings) -> Vec<DragNode> {
    let r = shape.column_radius;
    let rp = shape.plate_radius;
    let zt = shape.plate_top();
    let n = settings.strips_per_column.max(1);
    let dz = -zt / n as f64;
    let keel_cd = heave_plate_cd(0.0, &settings.kc_fit).unwrap_or(settings.kc_fit.max);
    let mut nodes = Vec::with_capacity(3 * (n + 2));
    for c in &shape.columns {
        for i in 0..n {
            nodes.push(DragNode {
                x: c[0],
                y: c[1],
                z: zt + dz * (i as f64 + 0.5),
                direction: DragDirection::Horizontal,
                kind: NodeKind::Column,
                area: 2.0 * r * dz,
                diameter: 2.0 * r,
                cd: settings.column_cd,
            });
        }
        nodes.push(DragNode {
            x: c[0],
            y: c[1],
            z: -shape.draft + 0.5 * shape.plate_height(),
            direction: DragDirection::Horizontal,
            kind: NodeKind::PlateEdge,
            area: 2.0 * rp * shape.plate_height(),
            diameter: 2.0 * rp,
            cd: settings.column_cd,
        });
        nodes.push(DragNode {
            x: c[0],
            y: c[1],
            z: -shape.draft,
            direction: DragDirection::Vertical,
            kind: NodeKind::Keel,
            area: PI * rp * rp,
            diameter: 2.0 * rp,
            cd: keel_cd,
        });
    }
    nodes
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HydroCoefficients {
    pub added_mass: [[f64; 3]; 3],
    pub omega: Vec<f64>,
    /// Excitation per unit amplitude on `omega`.
    pub force: Vec<[Complex64; 3]>,
    /// Mean drift coefficient on `omega` [N/m^2].
    pub drift: Vec<f64>,
    pub water_depth: f64,
    pub heading: f64,
}

impl HydroCoefficients {
    pub fn build(shape: &HullShape, settings: &HydroSettings) -> Result<Self> {
        settings.validate()?;
        let omega = settings.omega_grid();
        let force = omega
            .iter()
            .map(|&w| excitation(shape, w, settings.water_depth, settings.heading))
            .collect::<Result<Vec<_>>>()?;
        let drift = if settings.drift_table.is_empty() {
            omega
                .iter()
                .map(|&w| drift_heuristic(shape, w, settings.water_depth))
                .collect::<Result<Vec<_>>>()?
        } else {
            let (xs, ys): (Vec<f64>, Vec<f64>) = settings.drift_table.iter().copied().unzip();
            omega.iter().map(|&w| crate::numerics::interp1(&xs, &ys, w)).collect()
        };
        Ok(Self {
            added_mass: added_mass(shape),
            omega,
            force,
            drift,
            water_depth: settings.water_depth,
            heading: settings.heading,
        })
    }

    /// Excitation interpolated linearly in real and imaginary parts; zero outside the grid.
    pub fn excitation_at(&self, omega: f64) -> [Complex64; 3] {
        let n = self.omega.len();
        if n == 0 || omega < self.omega[0] || omega > self.omega[n - 1] {
            return [Complex64::default(); 3];
        }
        let i = self.omega.partition_point(|&w| w <= omega).clamp(1, n - 1) - 1;
        let s = (omega - self.omega[i]) / (self.omega[i + 1] - self.omega[i]);
        std::array::from_fn(|d| self.force[i][d] * (1.0 - s) + self.force[i + 1][d] * s)
    }

    pub fn drift_at(&self, omega: f64) -> f64 {
        crate::numerics::interp1(&self.omega, &self.drift, omega)
    }

    /// Replace the excitation (and optionally the added mass) with an external table.
    ///
    /// Layout, one row per frequency, `#` comments allowed:
    /// `omega, re_surge, im_surge, re_heave, im_heave, re_pitch, im_pitch`.
    /// An optional row `added_mass, a11, a13, a15, a33, a35, a55` sets the added mass.
    pub fn override_from_csv(&mut self, text: &str) -> Result<()> {
        let mut omega = Vec::new();
        let mut force = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("omega") {
                continue;
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number '{s}'", no + 1)))
            };
            if cells.len() != 7 {
                return Err(Error::Parse(format!("line {}: expected 7 columns", no + 1)));
            }
            let v = cells[1..].iter().map(|c| parse(c)).collect::<Result<Vec<f64>>>()?;
            if cells[0] == "added_mass" {
                self.added_mass = [[v[0], v[1], v[2]], [v[1], v[3], v[4]], [v[2], v[4], v[5]]];
                continue;
            }
            omega.push(parse(cells[0])?);
            force.push([
                Complex64::new(v[0], v[1]),
                Complex64::new(v[2], v[3]),
                Complex64::new(v[4], v[5]),
            ]);
        }
        if !omega.is_empty() {
            ensure!(
                omega.windows(2).all(|w| w[1] > w[0]),
                Parse,
                "frequencies must be strictly increasing"
            );
            self.drift = omega.iter().map(|&w| self.drift_at(w)).collect();
            self.omega = omega;
            self.force = force;
        }
        Ok(())
    }
}

/// Slow-drift force spectrum by Newman's approximation,
/// `S_F(mu) = 8 int S(w) S(w+mu) T(w) T(w+mu) dw`, evaluated on `mu_grid`.
pub fn newman_force_spectrum(
    omega: &[f64],
    wave_spectrum: &[f64],
    drift: &[f64],
    mu_grid: &[f64],
) -> Result<Vec<f64>> {
    ensure!(
        drift.iter().all(|&t| t >= 0.0),
        InvalidParameter,
        "drift coefficients must be non-negative"
    );
    let sx: Vec<f64> = wave_spectrum.iter().zip(drift).map(|(s, t)| s * t).collect();
    let w_last = *omega.last().unwrap_or(&0.0);
    Ok(mu_grid
        .iter()
        .map(|&mu| {
            let vals: Vec<f64> = omega
                .iter()
                .zip(&sx)
                .map(|(&w, &s)| {
                    if w + mu > w_last {
                        0.0
                    } else {
                        s * crate::numerics::interp1(omega, &sx, w + mu)
                    }
                })
                .collect();
            8.0 * crate::numerics::trapz(omega, &vals)
        })
        .collect())
}

/// Newman slow-drift force history from a wave component set: the difference-frequency
/// part of `2 (sum a_i sqrt(T_i) cos(w_i t + p_i))^2`, i.e. `|sum a_i sqrt(T_i) e^{i(w_i t + p_i)}|^2`.
pub fn newman_force_series(
    amplitudes: &[f64],
    omegas: &[f64],
    phases: &[f64],
    drift: &[f64],
    times: &[f64],
) -> Result<Vec<f64>> {
    ensure!(
        drift.iter().all(|&t| t >= 0.0),
        InvalidParameter,
        "drift coefficients must be non-negative"
    );
    let coef: Vec<f64> = amplitudes.iter().zip(drift).map(|(a, t)| a * t.sqrt()).collect();
    Ok(times
        .iter()
        .map(|&t| {
            let z: Complex64 = coef
                .iter()
                .zip(omegas.iter().zip(phases))
                .map(|(&c, (&w, &p))| Complex64::from_polar(c, w * t + p))
                .sum();
            z.norm_sqr()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{derive_geometry, ShapeParams};

    fn optimum() -> HullShape {
        derive_geometry(ShapeParams::new(24.0, 4.5).unwrap(), 21.94).unwrap()
    }

    #[test]
    fn dispersion_limits() {
        let k = wave_number(1.0, 1e4).unwrap();
        assert!((k - 1.0 / GRAVITY).abs() < 1e-12);
        let w = 0.01;
        let k = wave_number(w, 10.0).unwrap();
        assert!((k - w / (GRAVITY * 10.0).sqrt()).abs() / k < 1e-3);
        let k = wave_number(0.7, 130.0).unwrap();
        assert!((GRAVITY * k * (k * 130.0).tanh() - 0.49).abs() < 1e-10);
        assert!(wave_number(0.0, 100.0).is_err());
    }

    #[test]
    fn long_wave_heave_is_hydrostatic() {
        let s = optimum();
        let x = excitation(&s, 0.01, 130.0, 0.0).unwrap();
        let awp = 3.0 * PI * s.column_radius.powi(2);
        let expected = RHO_WATER * GRAVITY * awp;
        assert!((x[1].norm() - expected).abs() / expected < 0.01, "{}", x[1].norm() / expected);
    }

    #[test]
    fn single_column_inertia_regime_leads_elevation() {
        let s = derive_geometry(ShapeParams::with_ratio(24.0, 4.5, 1.0 + 1e-12).unwrap(), 21.94).unwrap();
        let mut one = s;
        one.columns = [[0.0, 0.0]; 3];
        let x = excitation(&one, 0.1, 130.0, 0.0).unwrap();
        let phase = x[0].arg().to_degrees();
        assert!((phase - 90.0).abs() < 2.0, "{phase}");
    }

    #[test]
    fn strip_added_mass_textbook() {
        // one column of unit radius, 1 m submerged, no plate enlargement
        let mut s = derive_geometry(ShapeParams::with_ratio(1.0 / (0.52 * 3f64.sqrt() / 2.0), 0.5, 1.0 + 1e-12).unwrap(), 1.0)
            .unwrap();
        s.columns = [[0.0, 0.0]; 3];
        assert!((s.column_radius - 1.0).abs() < 1e-12);
        let a = added_mass(&s);
        assert!((a[0][0] / 3.0 - RHO_WATER * PI).abs() < 1e-6);
    }

    #[test]
    fn added_mass_symmetric_and_heave_plate_effect() {
        let s = optimum();
        let a = added_mass(&s);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[i][j], a[j][i]);
            }
        }
        assert!(a[1][2].abs() < 1e-6 * a[1][1]);
        let (v, _) = crate::hull::displacement(&s);
        assert!(a[1][1] > RHO_WATER * v);
    }

    #[test]
    fn keel_cd_fit() {
        let fit = KcFit::default();
        assert_eq!(heave_plate_cd(0.0, &fit).unwrap(), 15.0);
        assert!((heave_plate_cd(1e12, &fit).unwrap() - 1.5).abs() < 1e-3);
        assert!(heave_plate_cd(-1.0, &fit).is_err());
        let mut prev = f64::INFINITY;
        for kc in linspace(0.1, 10.0, 200) {
            let c = heave_plate_cd(kc, &fit).unwrap();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn drag_node_partition() {
        let s = optimum();
        let set = HydroSettings::default();
        let nodes = drag_nodes(&s, &set);
        assert_eq!(nodes.len(), 3 * (set.strips_per_column + 2));
        let horiz: f64 = nodes
            .iter()
            .filter(|n| n.direction == DragDirection::Horizontal)
            .map(|n| n.area)
            .sum();
        let expected = 3.0 * (2.0 * s.column_radius * (s.draft - 4.5) + 2.0 * s.plate_radius * 4.5);
        assert!((horiz - expected).abs() < 1e-9 * expected);
        for n in nodes.iter().filter(|n| n.kind == NodeKind::Keel) {
            assert_eq!(n.z, -s.draft);
            assert!((n.area - PI * s.plate_radius.powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn borgman_zero_sigma() {
        let s = optimum();
        let n = drag_nodes(&s, &HydroSettings::default())[0];
        assert_eq!(n.linearized_coefficient(0.0), 0.0);
    }

    #[test]
    fn excitation_continuity_and_decay() {
        let s = optimum();
        let h = HydroCoefficients::build(&s, &HydroSettings::default()).unwrap();
        for d in 0..3 {
            let scale = h.force.iter().map(|f| f[d].norm()).fold(0.0, f64::max);
            for w in h.force.windows(2) {
                assert!((w[1][d] - w[0][d]).norm() < 0.05 * scale);
            }
        }
        let last = h.force.last().unwrap()[1].norm();
        assert!(last < 0.05 * h.force[0][1].norm());
    }

    #[test]
    fn heading_reversal_conjugates_heave() {
        let s = optimum();
        for w in [0.3, 0.6, 0.9] {
            let a = excitation(&s, w, 130.0, 0.0).unwrap();
            let b = excitation(&s, w, 130.0, PI).unwrap();
            // mirrored geometry: heave sees conjugated inter-column phases
            let mut m = s;
            for c in m.columns.iter_mut() {
                c[0] = -c[0];
            }
            let c = excitation(&m, w, 130.0, 0.0).unwrap();
            assert!((b[1] - c[1]).norm() < 1e-6 * a[1].norm().max(1.0));
            assert!((b[0] + c[0]).norm() < 1e-6 * a[0].norm().max(1.0));
        }
    }

    #[test]
    fn zero_drift_no_force() {
        let f = newman_force_series(&[1.0, 0.5], &[0.5, 0.6], &[0.0, 1.0], &[0.0, 0.0], &[0.0, 1.0, 2.0]).unwrap();
        assert!(f.iter().all(|&v| v == 0.0));
        assert!(newman_force_series(&[1.0], &[0.5], &[0.0], &[-1.0], &[0.0]).is_err());
    }

    #[test]
    fn monochromatic_drift_is_steady() {
        let times = linspace(0.0, 100.0, 51);
        let f = newman_force_series(&[2.0], &[0.7], &[0.3], &[5.0], &times).unwrap();
        assert!(f.iter().all(|&v| (v - 4.0 * 5.0).abs() < 1e-9));
    }
}
