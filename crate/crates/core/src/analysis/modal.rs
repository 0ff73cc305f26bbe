//! Undamped structural modes of the platform-tower system.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::slow::model::{NonlinearModel, OperatingPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mode {
    /// Natural frequency [rad/s].
    pub omega: f64,
    pub shape: [f64; 4],
    /// Share of modal kinetic energy per DOF (diagonal mass terms).
    pub participation: [f64; 4],
}

impl Mode {
    pub fn hz(&self) -> f64 {
        self.omega / (2.0 * std::f64::consts::PI)
    }
}

/// Modes of `K phi = w^2 M phi`, sorted by frequency.
pub fn undamped_modes(mass: &Matrix4<f64>, stiffness: &Matrix4<f64>) -> Result<Vec<Mode>> {
    let m = 0.5 * (mass + mass.transpose());
    let k = 0.5 * (stiffness + stiffness.transpose());
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Numerical("mass matrix not positive definite".into()))?;
    let l_inv = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let kt = l_inv * k * l_inv.transpose();
    let eig = SymmetricEigen::new(0.5 * (kt + kt.transpose()));
    let mut modes: Vec<Mode> = (0..4)
        .map(|i| {
            let phi = l_inv.transpose() * eig.eigenvectors.column(i);
            let e: Vec<f64> = (0..4).map(|d| m[(d, d)] * phi[d] * phi[d]).collect();
            let tot: f64 = e.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            Mode {
                omega: eig.eigenvalues[i].max(0.0).sqrt(),
                shape: [phi[0], phi[1], phi[2], phi[3]],
                participation: [e[0] / tot, e[1] / tot, e[2] / tot, e[3] / tot],
            }
        })
        .collect();
    modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    Ok(modes)
}

/// Modes about an operating point with the tangent mooring stiffness.
pub fn modes_at(model: &NonlinearModel, op: &OperatingPoint) -> Result<Vec<Mode>> {
    let k = model.structure.stiffness + model.mooring_stiffness(&op.q)?;
    undamped_modes(&model.structure.mass, &k)
}

/// Mode with the largest pitch participation.
pub fn pitch_mode(modes: &[Mode]) -> Mode {
    *modes
        .iter()
        .max_by(|a, b| a.participation[2].total_cmp(&b.participation[2]))
        .expect("four modes")
}

/// Oscillatory mode of a state matrix with the kinetic-energy share of each structural DOF,
/// states ordered `[q, q_dot, ...]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateMode {
    pub eigenvalue: Complex64,
    pub damping_ratio: f64,
    pub participation: [f64; 4],
}

/// Eigenvector of `a` for `lambda` by shifted inverse iteration.
fn eigenvector(a: &DMatrix<f64>, lambda: Complex64) -> Option<DVector<Complex64>> {
    let n = a.nrows();
    let shift = lambda + Complex64::new(1e-9 * lambda.norm().max(1e-6), 1e-9 * lambda.norm().max(1e-6));
    let m = a.map(|v| Complex64::new(v, 0.0)) - DMatrix::identity(n, n) * shift;
    let lu = m.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64));
    for _ in 0..3 {
        v = lu.solve(&v)?;
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return None;
        }
        v /= Complex64::new(norm, 0.0);
    }
    Some(v)
}

/// Oscillatory modes of `a` with DOF participation from `mass_diag`.
pub fn state_modes(a: &DMatrix<f64>, mass_diag: &[f64; 4]) -> Vec<StateMode> {
    a.complex_eigenvalues()
        .iter()
        .filter(|e| e.im > 1e-6)
        .filter_map(|&e| {
            let v = eigenvector(a, e)?;
            let en: Vec<f64> = (0..4).map(|k| mass_diag[k] * v[4 + k].norm_sqr()).collect();
            let tot = en.iter().sum::<f64>().max(f64::MIN_POSITIVE);
            Some(StateMode {
                eigenvalue: e,
                damping_ratio: -e.re / e.norm(),
                participation: [en[0] / tot, en[1] / tot, en[2] / tot, en[3] / tot],
            })
        })
        .collect()
}
