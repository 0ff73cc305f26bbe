//! Python module `hullsweep`: hull designs, sweep settings, per-design evaluation and
//! the fatigue and sea-state helpers. Results that are plain records come back as
//! dicts through their JSON form.

use hullsweep::analysis::fatigue::{self, FatigueSettings};
use hullsweep::environment::{wave_realization, WaveSpectrum};
use hullsweep::hull::{solve_draft_for_c55, ShapeParams};
use hullsweep::hydro::{heave_plate_cd, KcFit};
use hullsweep::sweep::{evaluate_design, evaluate_extreme, Mode, SweepSettings};
use hullsweep::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_) | Error::Parse(_) | Error::Constraint(_) | Error::Infeasible(_) | Error::OutOfRange(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

/// Sweep configuration; defaults reproduce the built-in grid and load cases.
#[pyclass(name = "Settings", from_py_object)]
#[derive(Clone)]
pub struct PySettings {
    pub inner: SweepSettings,
}

#[pymethods]
impl PySettings {
    #[new]
    fn new() -> Self {
        Self { inner: SweepSettings::default() }
    }

    /// Settings from TOML text with the same keys as the command-line config.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner: SweepSettings = toml::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = seed;
    }

    #[getter]
    fn c55_target(&self) -> f64 {
        self.inner.basis.c55_target
    }

    /// Operational load cases as dicts.
    fn cases<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let v = serde_json::to_value(self.inner.cases()).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &v)
    }

    /// `(spacing, plate_height)` grid points.
    fn grid(&self) -> Vec<(f64, f64)> {
        self.inner.grid.points()
    }
}

/// A ballasted hull that meets the pitch-restoring target.
#[pyclass(name = "Design", from_py_object)]
#[derive(Clone)]
pub struct PyDesign {
    pub inner: hullsweep::hull::Design,
}

#[pymethods]
impl PyDesign {
    #[new]
    #[pyo3(signature = (spacing, plate_height, settings=None))]
    fn new(spacing: f64, plate_height: f64, settings: Option<&PySettings>) -> PyResult<Self> {
        let s = settings.map(|s| s.inner.clone()).unwrap_or_default();
        let basis = s.resolved_basis().map_err(to_py)?;
        let p = ShapeParams::new(spacing, plate_height).map_err(to_py)?;
        let inner = solve_draft_for_c55(p, basis.c55_target, &basis, &s.turbine).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id.clone()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.shape.spacing()
    }

    #[getter]
    fn plate_height(&self) -> f64 {
        self.inner.shape.plate_height()
    }

    #[getter]
    fn draft(&self) -> f64 {
        self.inner.shape.draft
    }

    #[getter]
    fn column_radius(&self) -> f64 {
        self.inner.shape.column_radius
    }

    #[getter]
    fn plate_radius(&self) -> f64 {
        self.inner.shape.plate_radius
    }

    /// Floater mass including ballast [kg].
    #[getter]
    fn platform_mass(&self) -> f64 {
        self.inner.mass.platform().mass
    }

    #[getter]
    fn system_cm(&self) -> f64 {
        self.inner.mass.system().z_cm
    }

    #[getter]
    fn c55(&self) -> f64 {
        self.inner.hydrostatics.c55
    }

    #[getter]
    fn cost(&self) -> f64 {
        self.inner.cost
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let v = serde_json::to_value(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &v)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Design({}, draft={:.2} m)", self.inner.id, self.inner.shape.draft)
    }
}

/// Operational evaluation of one design; returns the full result record.
#[pyfunction]
#[pyo3(signature = (design, settings=None, mode="freq"))]
fn evaluate<'py>(py: Python<'py>, design: &PyDesign, settings: Option<&PySettings>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = settings.map(|s| s.inner.clone()).unwrap_or_default();
    let mode: Mode = mode.parse().map_err(to_py)?;
    let d = design.inner.clone();
    let r = py.detach(move || evaluate_design(&d, &s, mode)).map_err(to_py)?;
    let v = serde_json::to_value(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Parked-rotor extreme runs; maxima per seed and their means.
#[pyfunction]
#[pyo3(signature = (design, settings=None))]
fn extreme<'py>(py: Python<'py>, design: &PyDesign, settings: Option<&PySettings>) -> PyResult<Bound<'py, PyAny>> {
    let s = settings.map(|s| s.inner.clone()).unwrap_or_default();
    let d = design.inner.clone();
    let (r, _) = py.detach(move || evaluate_extreme(&d, &s)).map_err(to_py)?;
    let v = serde_json::to_value(&r).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Seeded JONSWAP surface elevation sampled every `dt`.
#[pyfunction]
#[pyo3(signature = (hs, tp, seed, duration, dt, gamma=None))]
fn jonswap_elevation(hs: f64, tp: f64, seed: u64, duration: f64, dt: f64, gamma: Option<f64>) -> PyResult<Vec<f64>> {
    let spec = WaveSpectrum::jonswap(hs, tp, gamma).map_err(to_py)?;
    Ok(wave_realization(&spec, seed, duration, dt).map_err(to_py)?.elevation)
}

/// Rainflow damage-equivalent load of a history lasting `duration` seconds.
#[pyfunction]
#[pyo3(signature = (x, duration, weight=1.0, wohler=4.0))]
fn rainflow_del(x: Vec<f64>, duration: f64, weight: f64, wohler: f64) -> PyResult<f64> {
    let f = FatigueSettings { wohler, ..Default::default() };
    fatigue::rainflow_del(&x, duration, weight, &f).map_err(to_py)
}

/// Dirlik damage-equivalent load of a one-sided PSD on `omega` [rad/s].
#[pyfunction]
#[pyo3(signature = (omega, psd, weight=1.0, wohler=4.0))]
fn spectral_del(omega: Vec<f64>, psd: Vec<f64>, weight: f64, wohler: f64) -> PyResult<f64> {
    let f = FatigueSettings { wohler, ..Default::default() };
    fatigue::spectral_del(&omega, &psd, weight, &f).map_err(to_py)
}

/// Heave-plate drag coefficient of the default fit at a Keulegan-Carpenter number.
#[pyfunction]
fn plate_cd(kc: f64) -> PyResult<f64> {
    heave_plate_cd(kc, &KcFit::default()).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "hullsweep")]
pub fn hullsweep_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySettings>()?;
    m.add_class::<PyDesign>()?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(extreme, m)?)?;
    m.add_function(wrap_pyfunction!(jonswap_elevation, m)?)?;
    m.add_function(wrap_pyfunction!(rainflow_del, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_del, m)?)?;
    m.add_function(wrap_pyfunction!(plate_cd, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
