//! Coupled planar equations of motion: platform surge, heave and pitch, tower first
//! fore-aft mode, rotor speed and blade pitch actuator.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::control::ControllerGains;
use crate::error::{ensure, Error, Result};
use crate::hull::{Design, GRAVITY};
use crate::hydro::{drag_nodes, DragNode, HydroCoefficients, HydroSettings};
use crate::numerics::bisect;
use crate::slow::mooring::{LineTension, MooringConfig, PlanarLoad};
use crate::slow::turbine::TurbineConfig;

/// Degrees of freedom of the structural model.
pub const NDOF: usize = 4;
/// Time-domain state: positions, velocities, rotor speed, pitch, speed filter, integrator.
pub const NSTATE: usize = 12;

pub mod idx {
    pub const SURGE: usize = 0;
    pub const HEAVE: usize = 1;
    pub const PITCH: usize = 2;
    pub const TOWER: usize = 3;
    pub const ROTOR: usize = 8;
    pub const BLADE: usize = 9;
    pub const FILTER: usize = 10;
    pub const INTEGRATOR: usize = 11;
}

/// Constant structural matrices over `[x_p, z_p, beta_p, x_t]`, SWL reference.
#[derive(Debug, Clone)]
pub struct Structure {
    /// Rigid body, tower mode and hydrodynamic added mass.
    pub mass: Matrix4<f64>,
    pub mass_inv: Matrix4<f64>,
    /// Hydrostatics, tower stiffness and gravity coupling (mooring excluded).
    pub stiffness: Matrix4<f64>,
    /// Tower structural damping.
    pub damping: Matrix4<f64>,
    /// Generalized-force map of a horizontal force at the hub.
    pub hub: Vector4<f64>,
    /// Horizontal displacement map of the tower top.
    pub tower_top: Vector4<f64>,
    pub tower_stiffness: f64,
    /// Lever of the elastic tower-base moment [m].
    pub tower_length: f64,
    /// RNA weight times the hub height above the tower base [N m].
    pub rna_weight: f64,
    pub rna_arm: f64,
}

impl Structure {
    pub fn assemble(design: &Design, hydro: &HydroCoefficients, turbine: &TurbineConfig) -> Result<Self> {
        let sys = design.mass.system();
        let lumps = turbine.tower_lumps(50);
        let phi_hub = turbine.phi(turbine.hub_height);
        let m_rna = turbine.rna_mass;
        let s0: f64 = lumps.iter().map(|&(z, m)| m * turbine.phi(z)).sum::<f64>() + m_rna * phi_hub;
        let s1: f64 =
            lumps.iter().map(|&(z, m)| m * z * turbine.phi(z)).sum::<f64>() + m_rna * turbine.hub_height * phi_hub;
        let s2: f64 = lumps.iter().map(|&(z, m)| m * turbine.phi(z).powi(2)).sum::<f64>() + m_rna * phi_hub * phi_hub;

        let mut mass = Matrix4::zeros();
        mass[(0, 0)] = sys.mass;
        mass[(1, 1)] = sys.mass;
        mass[(0, 2)] = sys.mass * sys.z_cm;
        mass[(2, 0)] = sys.mass * sys.z_cm;
        mass[(2, 2)] = sys.pitch_inertia;
        mass[(0, 3)] = s0;
        mass[(3, 0)] = s0;
        mass[(2, 3)] = s1;
        mass[(3, 2)] = s1;
        mass[(3, 3)] = s2;
        for i in 0..3 {
            for j in 0..3 {
                mass[(i, j)] += hydro.added_mass[i][j];
            }
        }
        let mass_inv = mass
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular mass matrix".into()))?;

        let k_t = turbine.tower_modal_stiffness();
        let mut stiffness = Matrix4::zeros();
        stiffness[(1, 1)] = design.hydrostatics.c33;
        stiffness[(2, 2)] = design.hydrostatics.c55;
        stiffness[(3, 3)] = k_t;
        stiffness[(2, 3)] = -GRAVITY * s0;
        stiffness[(3, 2)] = -GRAVITY * s0;
        let mut damping = Matrix4::zeros();
        damping[(3, 3)] = turbine.tower_modal_damping();

        Ok(Self {
            mass,
            mass_inv,
            stiffness,
            damping,
            hub: Vector4::new(1.0, 0.0, turbine.hub_height, phi_hub),
            tower_top: Vector4::new(1.0, 0.0, turbine.tower_top_elevation, 1.0),
            tower_stiffness: k_t,
            tower_length: turbine.tower_length(),
            rna_weight: m_rna * GRAVITY,
            rna_arm: turbine.hub_height - turbine.tower_base_elevation,
        })
    }

    /// Tower-base fore-aft bending moment: elastic part plus RNA weight offset.
    pub fn tower_base_moment(&self, pitch: f64, tower: f64) -> f64 {
        self.tower_stiffness * self.tower_length * tower + self.rna_weight * (self.rna_arm * pitch + tower)
    }

    /// Output map of `tower_base_moment` over the structural DOFs.
    pub fn tower_base_moment_row(&self) -> Vector4<f64> {
        Vector4::new(
            0.0,
            0.0,
            self.rna_weight * self.rna_arm,
            self.tower_stiffness * self.tower_length + self.rna_weight,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Parked,
    BelowRated,
    AboveRated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub wind_speed: f64,
    pub region: Region,
    /// Static displacements `[x_p, z_p, beta_p, x_t]`.
    pub q: [f64; 4],
    pub rotor_speed: f64,
    pub pitch: f64,
    pub generator_torque: f64,
    pub thrust: f64,
    pub aero_torque: f64,
    /// Max normalized residual of the static equations.
    pub residual: f64,
}

impl OperatingPoint {
    pub fn electrical_power(&self, efficiency: f64) -> f64 {
        efficiency * self.generator_torque * self.rotor_speed
    }
}

/// Parked-rotor aerodynamic drag settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParkedRotor {
    /// Drag coefficient referred to the swept area.
    pub drag_coefficient: f64,
    pub pitch: f64,
}

impl Default for ParkedRotor {
    fn default() -> Self {
        Self {
            drag_coefficient: 0.04,
            pitch: std::f64::consts::FRAC_PI_2,
        }
    }
}

/// Disturbance histories sampled at half the integration step.
#[derive(Debug, Clone, Default)]
pub struct Excitation {
    pub half_step: f64,
    pub wind: Vec<f64>,
    /// First-order wave generalized forces `[surge, heave, pitch]`.
    pub wave_force: [Vec<f64>; 3],
    /// Slow-drift surge force.
    pub drift: Vec<f64>,
    /// Undisturbed water velocity along each drag node's direction.
    pub node_velocity: Vec<Vec<f64>>,
    pub elevation: Vec<f64>,
}

impl Excitation {
    pub fn len(&self) -> usize {
        self.wind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wind.is_empty()
    }

    /// Constant wind, calm water.
    pub fn steady(wind: f64, half_step: f64, samples: usize, nodes: usize) -> Self {
        Self {
            half_step,
            wind: vec![wind; samples],
            wave_force: [vec![0.0; samples], vec![0.0; samples], vec![0.0; samples]],
            drift: vec![0.0; samples],
            node_velocity: vec![vec![0.0; samples]; nodes],
            elevation: vec![0.0; samples],
        }
    }
}

/// Rotor and controller inputs of one derivative evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RotorLoads {
    pub thrust: f64,
    pub aero_torque: f64,
    pub generator_torque: f64,
    pub pitch_command: f64,
}

#[derive(Debug, Clone)]
pub struct NonlinearModel {
    pub design: Design,
    pub hydro: HydroCoefficients,
    pub turbine: TurbineConfig,
    pub mooring: MooringConfig,
    pub nodes: Vec<DragNode>,
    pub structure: Structure,
    pub parked: ParkedRotor,
    /// Speed filter corner [rad/s].
    pub filter_omega: f64,
    mooring_zero: PlanarLoad,
    mooring_cache: Vec<LineTension>,
}

impl NonlinearModel {
    pub fn new(
        design: Design,
        hydro_settings: &HydroSettings,
        turbine: TurbineConfig,
        mooring: MooringConfig,
    ) -> Result<Self> {
        let hydro = HydroCoefficients::build(&design.shape, hydro_settings)?;
        let nodes = drag_nodes(&design.shape, hydro_settings);
        Self::from_parts(design, hydro, nodes, turbine, mooring)
    }

    pub fn from_parts(
        design: Design,
        hydro: HydroCoefficients,
        nodes: Vec<DragNode>,
        turbine: TurbineConfig,
        mooring: MooringConfig,
    ) -> Result<Self> {
        turbine.validate()?;
        mooring.validate()?;
        let structure = Structure::assemble(&design, &hydro, &turbine)?;
        let mooring_zero = mooring.planar_load(0.0, 0.0, 0.0)?;
        Ok(Self {
            design,
            hydro,
            turbine,
            mooring,
            nodes,
            structure,
            parked: ParkedRotor::default(),
            filter_omega: 2.0 * std::f64::consts::PI * 0.5,
            mooring_zero,
            mooring_cache: Vec::new(),
        })
    }

    /// Drops the mooring warm start so the next solve does not depend on earlier runs.
    pub fn reset_warm_start(&mut self) {
        self.mooring_cache.clear();
    }

    /// Mooring load relative to the zero-displacement pretension.
    pub fn mooring_load(&mut self, q: &[f64]) -> Result<Vector4<f64>> {
        let f = self
            .mooring
            .planar_load_warm(q[0], q[1], q[2], &mut self.mooring_cache)?;
        Ok(Vector4::new(
            f.surge - self.mooring_zero.surge,
            f.heave - self.mooring_zero.heave,
            f.pitch - self.mooring_zero.pitch,
            0.0,
        ))
    }

    /// Mooring stiffness padded to the structural DOFs.
    pub fn mooring_stiffness(&self, q: &[f64; 4]) -> Result<Matrix4<f64>> {
        let k = self.mooring.stiffness(q[0], q[1], q[2])?;
        let mut m = Matrix4::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = k[i][j];
            }
        }
        Ok(m)
    }

    /// Parked-rotor drag thrust.
    pub fn parked_thrust(&self, v_rel: f64) -> f64 {
        0.5 * self.turbine.air_density * self.turbine.swept_area() * self.parked.drag_coefficient * v_rel * v_rel.abs()
    }

    /// Rotor loads and control commands at a state.
    pub fn rotor_loads(&self, x: &[f64; NSTATE], v_rel: f64, gains: &ControllerGains, region: Region) -> Result<RotorLoads> {
        if region == Region::Parked {
            return Ok(RotorLoads {
                thrust: self.parked_thrust(v_rel),
                aero_torque: 0.0,
                generator_torque: 0.0,
                pitch_command: self.parked.pitch,
            });
        }
        let omega = x[idx::ROTOR];
        if !(omega > 1e-3) {
            return Err(Error::Numerical(format!("rotor speed collapsed to {omega:.3e} rad/s")));
        }
        let aero = self.turbine.aero_forces(v_rel, omega, x[idx::BLADE])?;
        let (m_g, cmd) = gains.commands(x[idx::FILTER], x[idx::BLADE], x[idx::INTEGRATOR]);
        Ok(RotorLoads {
            thrust: aero.thrust,
            aero_torque: aero.torque,
            generator_torque: m_g,
            pitch_command: cmd,
        })
    }

    /// State derivative at half-step sample `k` of the excitation.
    pub fn derivative(
        &mut self,
        x: &[f64; NSTATE],
        k: usize,
        env: &Excitation,
        gains: &ControllerGains,
        region: Region,
    ) -> Result<([f64; NSTATE], RotorLoads)> {
        let k = k.min(env.len().saturating_sub(1));
        let q = Vector4::new(x[0], x[1], x[2], x[3]);
        let qd = Vector4::new(x[4], x[5], x[6], x[7]);
        let s = &self.structure;
        let v_rel = env.wind[k] - s.hub.dot(&qd);
        let rotor = self.rotor_loads(x, v_rel, gains, region)?;

        let mut f = s.hub * rotor.thrust - s.stiffness * q - s.damping * qd;
        f[0] += env.wave_force[0][k] + env.drift[k];
        f[1] += env.wave_force[1][k];
        f[2] += env.wave_force[2][k];
        for (n, node) in self.nodes.iter().enumerate() {
            let l = node.lever();
            let u = env.node_velocity[n][k] - (l[0] * qd[0] + l[1] * qd[1] + l[2] * qd[2]);
            let fd = node.quadratic_coefficient() * u * u.abs();
            f[0] += l[0] * fd;
            f[1] += l[1] * fd;
            f[2] += l[2] * fd;
        }
        f += self.mooring_load(x)?;
        let qdd = self.structure.mass_inv * f;

        let mut dx = [0.0; NSTATE];
        dx[..4].copy_from_slice(qd.as_slice());
        dx[4..8].copy_from_slice(qdd.as_slice());
        if region != Region::Parked {
            let t = &self.turbine;
            dx[idx::ROTOR] = (rotor.aero_torque - rotor.generator_torque) / t.drivetrain_inertia;
            dx[idx::BLADE] = (rotor.pitch_command - x[idx::BLADE]) / t.actuator_time_constant;
            dx[idx::FILTER] = self.filter_omega * (x[idx::ROTOR] - x[idx::FILTER]);
            dx[idx::INTEGRATOR] = gains.integrator_rate(x[idx::FILTER], x[idx::BLADE], x[idx::INTEGRATOR]);
        }
        if dx.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite state derivative at sample {k}: {x:?}")));
        }
        Ok((dx, rotor))
    }

    /// Steady rotor state `(region, rotor speed, pitch, generator torque)` for a mean wind.
    pub fn steady_rotor(&self, wind: f64) -> Result<(Region, f64, f64, f64)> {
        let t = &self.turbine;
        if wind < t.cut_in || wind > t.cut_out {
            return Ok((Region::Parked, 0.0, self.parked.pitch, 0.0));
        }
        let k = t.torque_constant();
        let m_r = t.rated_torque();
        let w_r = t.rated_rotor_speed;
        let residual = |w: f64| -> f64 {
            t.aero_forces(wind, w, t.min_pitch).map(|a| a.torque).unwrap_or(0.0) - k * w * w
        };
        // region 2: balance of aero torque and the optimal-TSR law below rated speed
        if residual(w_r) < 0.0 {
            let w = bisect(residual, 0.05, w_r, 1e-10, 200)?;
            return Ok((Region::BelowRated, w, t.min_pitch, k * w * w));
        }
        let excess = |th: f64| -> f64 { t.aero_forces(wind, w_r, th).map(|a| a.torque).unwrap_or(0.0) - m_r };
        ensure!(
            excess(t.max_pitch) < 0.0,
            NonConvergence,
            "no pitch angle limits torque at {wind} m/s"
        );
        let th = if excess(t.min_pitch) <= 0.0 {
            t.min_pitch
        } else {
            bisect(excess, t.min_pitch, t.max_pitch, 1e-10, 200)?
        };
        Ok((Region::AboveRated, w_r, th, m_r))
    }

    /// Static equilibrium at a mean wind under the steady control law.
    pub fn operating_point(&mut self, wind: f64) -> Result<OperatingPoint> {
        self.operating_point_with(wind, 0.0)
    }

    /// Static equilibrium with an additional mean surge force, e.g. wave drift.
    pub fn operating_point_with(&mut self, wind: f64, surge_force: f64) -> Result<OperatingPoint> {
        ensure!(wind >= 0.0, InvalidParameter, "wind speed must be non-negative");
        let (region, omega, pitch, m_g) = self.steady_rotor(wind)?;
        let (thrust, aero_torque) = match region {
            Region::Parked => (self.parked_thrust(wind), 0.0),
            _ => {
                let a = self.turbine.aero_forces(wind, omega, pitch)?;
                (a.thrust, a.torque)
            }
        };
        let mut load = self.structure.hub * thrust;
        load[0] += surge_force;
        let mut q = [0.0; 4];
        let scale = load.norm().max(1.0);
        let mut residual = f64::INFINITY;
        for _ in 0..50 {
            let r = load - self.structure.stiffness * Vector4::from(q) + self.mooring_load(&q)?;
            residual = r.amax() / scale;
            if residual < 1e-9 {
                break;
            }
            let kt = self.structure.stiffness + self.mooring_stiffness(&q)?;
            let dq = kt
                .lu()
                .solve(&r)
                .ok_or_else(|| Error::Numerical("singular static stiffness".into()))?;
            for i in 0..4 {
                q[i] += dq[i];
            }
        }
        if residual > 1e-6 {
            return Err(Error::NonConvergence(format!(
                "operating point at {wind} m/s: residual {residual:.2e}"
            )));
        }
        Ok(OperatingPoint {
            wind_speed: wind,
            region,
            q,
            rotor_speed: omega,
            pitch,
            generator_torque: m_g,
            thrust,
            aero_torque,
            residual,
        })
    }

    /// Time-domain state at an operating point.
    pub fn initial_state(&self, op: &OperatingPoint) -> [f64; NSTATE] {
        let mut x = [0.0; NSTATE];
        x[..4].copy_from_slice(&op.q);
        x[idx::ROTOR] = op.rotor_speed;
        x[idx::BLADE] = op.pitch;
        x[idx::FILTER] = op.rotor_speed;
        x[idx::INTEGRATOR] = op.pitch;
        x
    }
}
