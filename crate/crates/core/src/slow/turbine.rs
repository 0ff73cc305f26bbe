//! Wind turbine description: rotor coefficient tables, drivetrain, tower mode.
//!
//! Defaults approximate the DTU 10 MW reference turbine (rotor radius, hub height,
//! tower/RNA masses, drivetrain inertia). The power coefficient surface is a
//! smooth parametric stand-in for the blade-element data of the reference report;
//! thrust follows from momentum theory and a calibration factor.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub const BETZ_LIMIT: f64 = 16.0 / 27.0;

/// Tabulated rotor power and thrust coefficients over tip-speed ratio and blade pitch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RotorTable {
    /// Tip-speed ratio grid (ascending).
    pub tsr: Vec<f64>,
    /// Blade pitch grid [rad] (ascending).
    pub pitch: Vec<f64>,
    /// Power coefficient, row-major `[tsr][pitch]`.
    pub cp: Vec<f64>,
    /// Thrust coefficient, row-major `[tsr][pitch]`.
    pub ct: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorCoefficients {
    pub cp: f64,
    pub ct: f64,
    /// True when the query was clamped to the table bounds.
    pub clamped: bool,
}

impl RotorTable {
    /// Parametric table: power coefficient from the exponential blade-element fit
    /// `cp = 0.5176 (116/li - 0.4 th - 5) exp(-21/li) + 0.0068 tsr` (pitch in degrees),
    /// thrust from the axial induction matching `cp = 4a(1-a)^2`, scaled by `thrust_scale`.
    pub fn parametric(thrust_scale: f64) -> Self {
        let tsr: Vec<f64> = (0..=300).map(|i| 1.0 + 0.05 * i as f64).collect();
        let pitch_deg: Vec<f64> = (0..=450).map(|i| 0.1 * i as f64).collect();
        let mut cp = Vec::with_capacity(tsr.len() * pitch_deg.len());
        let mut ct = Vec::with_capacity(tsr.len() * pitch_deg.len());
        for &l in &tsr {
            for &th in &pitch_deg {
                let c = parametric_cp(l, th);
                cp.push(c);
                ct.push(thrust_scale * thrust_from_power(c));
            }
        }
        Self {
            tsr,
            pitch: pitch_deg.iter().map(|d| d.to_radians()).collect(),
            cp,
            ct,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tsr.len() * self.pitch.len();
        ensure!(
            self.tsr.len() >= 2 && self.pitch.len() >= 2,
            InvalidParameter,
            "rotor table needs at least a 2x2 grid"
        );
        ensure!(
            self.cp.len() == n && self.ct.len() == n,
            InvalidParameter,
            "rotor table size mismatch"
        );
        ensure!(
            self.cp.iter().all(|&c| c <= BETZ_LIMIT),
            InvalidParameter,
            "power coefficient exceeds the Betz limit"
        );
        Ok(())
    }

    /// Bilinear interpolation; queries outside the grid are clamped and flagged.
    pub fn lookup(&self, tsr: f64, pitch: f64) -> RotorCoefficients {
        let (i, ti, ci) = bracket(&self.tsr, tsr);
        let (j, tj, cj) = bracket(&self.pitch, pitch);
        let np = self.pitch.len();
        let at = |v: &[f64], a: usize, b: usize| v[a * np + b];
        let blend = |v: &[f64]| {
            let v00 = at(v, i, j);
            let v01 = at(v, i, j + 1);
            let v10 = at(v, i + 1, j);
            let v11 = at(v, i + 1, j + 1);
            (1.0 - ti) * ((1.0 - tj) * v00 + tj * v01) + ti * ((1.0 - tj) * v10 + tj * v11)
        };
        RotorCoefficients {
            cp: blend(&self.cp),
            ct: blend(&self.ct),
            clamped: ci || cj,
        }
    }

    /// Peak power coefficient at the given pitch and the tip-speed ratio where it occurs.
    pub fn optimum(&self, pitch: f64) -> (f64, f64) {
        // refine on a fine tsr grid through the interpolant
        let lo = self.tsr[0];
        let hi = *self.tsr.last().unwrap();
        let mut best = (lo, f64::MIN);
        let n = 4000;
        for k in 0..=n {
            let l = lo + (hi - lo) * k as f64 / n as f64;
            let c = self.lookup(l, pitch).cp;
            if c > best.1 {
                best = (l, c);
            }
        }
        best
    }
}

fn bracket(grid: &[f64], x: f64) -> (usize, f64, bool) {
    let n = grid.len();
    if x <= grid[0] {
        return (0, 0.0, x < grid[0]);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0, x > grid[n - 1]);
    }
    let i = grid.partition_point(|&g| g <= x).saturating_sub(1).min(n - 2);
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]), false)
}

fn parametric_cp(tsr: f64, pitch_deg: f64) -> f64 {
    let inv_li = 1.0 / (tsr + 0.08 * pitch_deg) - 0.035 / (pitch_deg.powi(3) + 1.0);
    0.5176 * (116.0 * inv_li - 0.4 * pitch_deg - 5.0) * (-21.0 * inv_li).exp() + 0.0068 * tsr
}

/// Momentum-theory thrust coefficient for a given power coefficient (lower induction branch).
pub fn thrust_from_power(cp: f64) -> f64 {
    let cp = cp.min(BETZ_LIMIT);
    let f = |a: f64| 4.0 * a * (1.0 - a) * (1.0 - a) - cp;
    let (mut lo, mut hi) = (-2.0, 1.0 / 3.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    4.0 * a * (1.0 - a)
}

/// Tower first fore-aft mode shape as a polynomial in the normalized height.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ModeShape {
    /// Coefficients of xi^k, k = 0..; normalized so the shape is 1 at the tower top.
    pub coefficients: Vec<f64>,
}

impl Default for ModeShape {
    fn default() -> Self {
        // static tip-load cantilever deflection
        Self {
            coefficients: vec![0.0, 0.0, 1.5, -0.5],
        }
    }
}

impl ModeShape {
    pub fn eval(&self, xi: f64) -> f64 {
        if xi <= 0.0 {
            return 0.0;
        }
        let xi = xi.min(1.0);
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * xi + c)
    }

    pub fn tip_value(&self) -> f64 {
        self.coefficients.iter().sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TurbineConfig {
    /// Rated electrical power [W].
    pub rated_power: f64,
    pub generator_efficiency: f64,
    /// Rated rotor speed [rad/s]. Defaults to the speed where the optimal-TSR torque
    /// law reaches rated power, so region 2 meets region 3 without a transition.
    pub rated_rotor_speed: f64,
    pub rotor_radius: f64,
    /// Hub height above SWL [m].
    pub hub_height: f64,
    pub tower_base_elevation: f64,
    pub tower_top_elevation: f64,
    /// Tower mass [kg], uniformly distributed.
    pub tower_mass: f64,
    /// Rotor-nacelle assembly mass [kg], lumped at the hub.
    pub rna_mass: f64,
    /// Drivetrain inertia about the shaft, low-speed side [kg m^2].
    pub drivetrain_inertia: f64,
    pub air_density: f64,
    pub cut_in: f64,
    pub cut_out: f64,
    pub min_pitch: f64,
    pub max_pitch: f64,
    /// Blade pitch actuator first-order time constant [s].
    pub actuator_time_constant: f64,
    /// Fixed-base tower first fore-aft frequency [Hz].
    pub tower_frequency: f64,
    pub tower_damping_ratio: f64,
    pub mode_shape: ModeShape,
    /// Calibration factor applied to momentum thrust in the default table.
    pub thrust_scale: f64,
    pub rotor: RotorTable,
}

impl Default for TurbineConfig {
    fn default() -> Self {
        Self::dtu_10mw()
    }
}

impl TurbineConfig {
    pub fn dtu_10mw() -> Self {
        let thrust_scale = 1.2;
        let mut cfg = Self {
            rated_power: 10.0e6,
            generator_efficiency: 0.94,
            rated_rotor_speed: 0.0,
            rotor_radius: 89.15,
            hub_height: 119.0,
            tower_base_elevation: 10.0,
            tower_top_elevation: 115.63,
            tower_mass: 628.4e3,
            rna_mass: 674.0e3,
            drivetrain_inertia: 1.6e8,
            air_density: 1.225,
            cut_in: 4.0,
            cut_out: 25.0,
            min_pitch: 0.0,
            max_pitch: 45f64.to_radians(),
            actuator_time_constant: 0.3,
            tower_frequency: 0.25,
            tower_damping_ratio: 0.01,
            mode_shape: ModeShape::default(),
            thrust_scale,
            rotor: RotorTable::parametric(thrust_scale),
        };
        cfg.rated_rotor_speed = cfg.consistent_rated_speed();
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.rotor.validate()?;
        ensure!(
            self.actuator_time_constant > 0.0,
            InvalidParameter,
            "actuator time constant must be positive"
        );
        ensure!(
            (self.mode_shape.tip_value() - 1.0).abs() < 1e-9,
            InvalidParameter,
            "mode shape must be 1 at the tower top"
        );
        ensure!(
            self.tower_top_elevation > self.tower_base_elevation,
            InvalidParameter,
            "tower top below tower base"
        );
        ensure!(
            self.rated_rotor_speed > 0.0 && self.rated_power > 0.0,
            InvalidParameter,
            "rated values must be positive"
        );
        Ok(())
    }

    pub fn swept_area(&self) -> f64 {
        std::f64::consts::PI * self.rotor_radius.powi(2)
    }

    pub fn tower_length(&self) -> f64 {
        self.tower_top_elevation - self.tower_base_elevation
    }

    /// Mode shape evaluated at an elevation; zero below the tower base.
    pub fn phi(&self, z: f64) -> f64 {
        self.mode_shape
            .eval((z - self.tower_base_elevation) / self.tower_length())
    }

    /// Rated aerodynamic (shaft) power [W].
    pub fn rated_mech_power(&self) -> f64 {
        self.rated_power / self.generator_efficiency
    }

    pub fn optimal_tsr(&self) -> (f64, f64) {
        self.rotor.optimum(self.min_pitch)
    }

    /// Below-rated torque constant `K` for `M_g = K Omega^2` [N m s^2].
    pub fn torque_constant(&self) -> f64 {
        let (tsr, cp) = self.optimal_tsr();
        0.5 * self.air_density * self.swept_area() * self.rotor_radius.powi(3) * cp / tsr.powi(3)
    }

    pub fn consistent_rated_speed(&self) -> f64 {
        (self.rated_mech_power() / self.torque_constant()).cbrt()
    }

    /// Rated generator torque on the low-speed shaft [N m].
    pub fn rated_torque(&self) -> f64 {
        self.rated_mech_power() / self.rated_rotor_speed
    }

    /// Wind speed at which the optimal-TSR law first reaches rated power.
    pub fn rated_wind_speed(&self) -> f64 {
        let (tsr, cp) = self.optimal_tsr();
        let v_opt = self.rated_rotor_speed * self.rotor_radius / tsr;
        let p_opt = 0.5 * self.air_density * self.swept_area() * cp * v_opt.powi(3);
        if p_opt >= self.rated_mech_power() {
            (self.rated_mech_power() / (0.5 * self.air_density * self.swept_area() * cp)).cbrt()
        } else {
            v_opt
        }
    }

    /// Quasi-static actuator-disk thrust [N] and aerodynamic torque [N m].
    pub fn aero_forces(&self, v_rel: f64, omega: f64, pitch: f64) -> Result<AeroLoads> {
        if omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "aerodynamic torque undefined for rotor speed {omega}"
            )));
        }
        if v_rel <= 0.0 {
            return Ok(AeroLoads {
                thrust: 0.0,
                torque: 0.0,
                clamped: true,
            });
        }
        let tsr = omega * self.rotor_radius / v_rel;
        let c = self.rotor.lookup(tsr, pitch);
        let q = 0.5 * self.air_density * self.swept_area() * v_rel * v_rel;
        Ok(AeroLoads {
            thrust: q * c.ct,
            torque: q * c.cp * v_rel / omega,
            clamped: c.clamped,
        })
    }

    /// Distributed tower masses as (elevation, mass) points.
    pub fn tower_lumps(&self, n: usize) -> Vec<(f64, f64)> {
        let dz = self.tower_length() / n as f64;
        (0..n)
            .map(|i| {
                (
                    self.tower_base_elevation + dz * (i as f64 + 0.5),
                    self.tower_mass / n as f64,
                )
            })
            .collect()
    }

    /// Tower modal mass including the RNA at the tower top.
    pub fn tower_modal_mass(&self) -> f64 {
        self.tower_lumps(50)
            .iter()
            .map(|&(z, m)| m * self.phi(z).powi(2))
            .sum::<f64>()
            + self.rna_mass
    }

    pub fn tower_modal_stiffness(&self) -> f64 {
        self.tower_modal_mass() * (2.0 * std::f64::consts::PI * self.tower_frequency).powi(2)
    }

    pub fn tower_modal_damping(&self) -> f64 {
        2.0 * self.tower_damping_ratio * (self.tower_modal_stiffness() * self.tower_modal_mass()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroLoads {
    pub thrust: f64,
    pub torque: f64,
    pub clamped: bool,
}
