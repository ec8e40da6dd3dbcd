//! Python bindings for the `jcretard` simulator.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use jcretard::cli::default_t_max;
use jcretard::{
    build_mode_grid, AngleConvention, CouplingProfile, DoubleExcSystem, Error, Record,
    SingleExcSystem, StepPlan, TwoQubitDensity,
};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::NonFinite { .. } => PyArithmeticError::new_err(err.to_string()),
        Error::Io(_) | Error::EmptyTrajectory => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

/// Parameters of the two identical atom-cavity systems.
#[pyclass(name = "SystemConfig", module = "jcretard", skip_from_py_object)]
#[derive(Clone)]
struct PySystemConfig {
    inner: jcretard::SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (omega_a = 4840.0, length_ratio = 670.0, n_modes = 19, theta = std::f64::consts::FRAC_PI_4, coupling_profile = "sqrtfreq"))]
    fn new(
        omega_a: f64,
        length_ratio: f64,
        n_modes: usize,
        theta: f64,
        coupling_profile: &str,
    ) -> PyResult<Self> {
        let inner = jcretard::SystemConfig {
            omega_a,
            length_ratio,
            n_modes,
            theta,
            coupling_profile: coupling_profile.parse::<CouplingProfile>().map_err(to_py)?,
        };
        inner.validate().map_err(to_py)?;
        Ok(PySystemConfig { inner })
    }

    #[getter]
    fn omega_a(&self) -> f64 {
        self.inner.omega_a
    }

    #[getter]
    fn length_ratio(&self) -> f64 {
        self.inner.length_ratio
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta
    }

    #[getter]
    fn coupling_profile(&self) -> String {
        self.inner.coupling_profile.to_string()
    }

    fn mode_spacing(&self) -> f64 {
        self.inner.mode_spacing()
    }

    fn retardation_time(&self) -> PyResult<f64> {
        jcretard::retardation_time(&self.inner).map_err(to_py)
    }

    /// Default integration step of the single-excitation sector.
    fn default_step(&self) -> PyResult<f64> {
        Ok(jcretard::default_step(
            &build_mode_grid(&self.inner).map_err(to_py)?,
        ))
    }

    fn grid(&self) -> PyResult<PyModeGrid> {
        build_mode_grid(&self.inner)
            .map(|inner| PyModeGrid { inner })
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SystemConfig(omega_a={}, length_ratio={}, n_modes={}, theta={}, coupling_profile='{}')",
            c.omega_a, c.length_ratio, c.n_modes, c.theta, c.coupling_profile
        )
    }
}

#[pyclass(name = "ModeGrid", module = "jcretard", skip_from_py_object)]
#[derive(Clone)]
struct PyModeGrid {
    inner: jcretard::ModeGrid,
}

#[pymethods]
impl PyModeGrid {
    #[getter]
    fn detunings(&self) -> Vec<f64> {
        self.inner.detunings.clone()
    }

    #[getter]
    fn couplings(&self) -> Vec<f64> {
        self.inner.couplings.clone()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing
    }

    fn collective_coupling(&self) -> f64 {
        self.inner.collective_coupling()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn plan(
    config: &jcretard::SystemConfig,
    t_max: Option<f64>,
    dt: f64,
    stride: usize,
) -> PyResult<StepPlan> {
    let t_max = match t_max {
        Some(t) => t,
        None => default_t_max(config).map_err(to_py)?,
    };
    Ok(StepPlan::new(t_max, dt, stride))
}

/// Integrates the single-excitation sector. Returns a dict of equal-length
/// lists keyed by column name.
#[pyfunction]
#[pyo3(signature = (config, initial = "atoms", t_max = None, dt = None, stride = 10))]
fn simulate_single<'py>(
    py: Python<'py>,
    config: PyRef<'_, PySystemConfig>,
    initial: &str,
    t_max: Option<f64>,
    dt: Option<f64>,
    stride: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.inner;
    let grid = build_mode_grid(&cfg).map_err(to_py)?;
    let state = match initial {
        "atoms" => jcretard::init_atoms_entangled(cfg.theta, &grid),
        "fields" => jcretard::init_fields_entangled(cfg.theta, &grid),
        other => {
            return Err(PyValueError::new_err(format!(
                "initial must be atoms|fields, got {other}"
            )))
        }
    };
    let sys = SingleExcSystem::new(grid);
    let dt = dt.unwrap_or_else(|| jcretard::run_step(&sys));
    let plan = plan(&cfg, t_max, dt, stride)?;
    let (traj, _) = py
        .detach(|| jcretard::integrate(&sys, &state, &plan, |_, s| jcretard::record_single(s)))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("t", traj.times.clone())?;
    out.set_item("c_ab", traj.map(|r| r.concurrence))?;
    out.set_item("pop1", traj.map(|r| r.obs.pop1))?;
    out.set_item("pop2", traj.map(|r| r.obs.pop2))?;
    out.set_item("pop_cav_a", traj.map(|r| r.obs.pop_a))?;
    out.set_item("pop_cav_b", traj.map(|r| r.obs.pop_b))?;
    out.set_item("norm", traj.map(|r| r.obs.norm))?;
    out.set_item("c1", traj.map(|r| r.c1))?;
    out.set_item("c2", traj.map(|r| r.c2))?;
    Ok(out)
}

/// Integrates the two-excitation sector; see [`simulate_single`].
#[pyfunction]
#[pyo3(signature = (config, angle_convention = "printed", t_max = None, dt = None, stride = 10))]
fn simulate_double<'py>(
    py: Python<'py>,
    config: PyRef<'_, PySystemConfig>,
    angle_convention: &str,
    t_max: Option<f64>,
    dt: Option<f64>,
    stride: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config.inner;
    let grid = build_mode_grid(&cfg).map_err(to_py)?;
    let conv: AngleConvention = angle_convention.parse().map_err(to_py)?;
    let state = conv.init(cfg.theta, &grid);
    let sys = DoubleExcSystem::new(grid);
    let dt = dt.unwrap_or_else(|| jcretard::run_step(&sys));
    let plan = plan(&cfg, t_max, dt, stride)?;
    let (traj, _) = py
        .detach(|| jcretard::integrate(&sys, &state, &plan, |_, s| jcretard::record_double(s)))
        .map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("t", traj.times.clone())?;
    out.set_item("c_ab", traj.map(|r| r.concurrence))?;
    out.set_item("p11", traj.map(|r| r.obs.p11))?;
    out.set_item("p2", traj.map(|r| r.obs.p2))?;
    out.set_item("p3", traj.map(|r| r.obs.p3))?;
    out.set_item("p4", traj.map(|r| r.obs.p4))?;
    out.set_item("p00", traj.map(|r| r.obs.p00))?;
    out.set_item("norm", traj.map(|r| r.norm()))?;
    Ok(out)
}

/// Wootters concurrence of a 4×4 two-qubit density matrix given as nested
/// lists in the basis |ee>, |eg>, |ge>, |gg>.
#[pyfunction]
fn concurrence(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let rows: Vec<[Complex64; 4]> = rho
        .into_iter()
        .map(<[Complex64; 4]>::try_from)
        .collect::<Result<_, _>>()
        .map_err(|_| PyValueError::new_err("rho must be 4x4"))?;
    let rows: [[Complex64; 4]; 4] = rows
        .try_into()
        .map_err(|_| PyValueError::new_err("rho must be 4x4"))?;
    jcretard::concurrence_wootters(&TwoQubitDensity::from_rows(rows)).map_err(to_py)
}

#[pyfunction]
fn memory_kernel(config: PyRef<'_, PySystemConfig>, tau: f64) -> PyResult<Complex64> {
    let grid = build_mode_grid(&config.inner).map_err(to_py)?;
    Ok(jcretard::memory_kernel(&grid, tau))
}

/// `[(tau, K(tau))]` on a uniform grid from 0 to `tau_max`.
#[pyfunction]
fn kernel_samples(
    config: PyRef<'_, PySystemConfig>,
    tau_max: f64,
    dtau: f64,
) -> PyResult<Vec<(f64, Complex64)>> {
    let grid = build_mode_grid(&config.inner).map_err(to_py)?;
    jcretard::kernel_samples(&grid, tau_max, dtau).map_err(to_py)
}

#[pyfunction]
fn predict_revival_times(config: PyRef<'_, PySystemConfig>, count: usize) -> PyResult<Vec<f64>> {
    jcretard::predict_revival_times(&config.inner, count)
        .map(|p| p.times)
        .map_err(to_py)
}

/// Segments a sampled concurrence curve. Returns a dict with `revivals`
/// as `(onset, peak_time, peak)` tuples and `dead_intervals` as
/// `(start, end)` tuples.
#[pyfunction]
#[pyo3(signature = (times, values, min_gap, floor = jcretard::retardation::DEFAULT_FLOOR))]
fn detect_revivals<'py>(
    py: Python<'py>,
    times: Vec<f64>,
    values: Vec<f64>,
    min_gap: f64,
    floor: f64,
) -> PyResult<Bound<'py, PyDict>> {
    if times.len() != values.len() {
        return Err(PyValueError::new_err("times and values differ in length"));
    }
    let report = jcretard::retardation::detect_revivals_in(&times, &values, floor, min_gap)
        .map_err(to_py)?;
    let out = PyDict::new(py);
    let revivals: Vec<(f64, f64, f64)> = report
        .revivals
        .iter()
        .map(|r| (r.onset, r.peak_time, r.peak))
        .collect();
    out.set_item("revivals", revivals)?;
    out.set_item("dead_intervals", report.dead_intervals)?;
    Ok(out)
}

/// Runs the command-line front end with `args` (without the program name)
/// and returns its exit status.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("jcretard".to_string())
        .chain(args)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = py.detach(|| jcretard::cli::run_cli(argv, &mut out, &mut err));
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    code
}

#[pymodule(name = "jcretard")]
fn jcretard_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyModeGrid>()?;
    m.add_function(wrap_pyfunction!(simulate_single, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_double, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(memory_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_samples, m)?)?;
    m.add_function(wrap_pyfunction!(predict_revival_times, m)?)?;
    m.add_function(wrap_pyfunction!(detect_revivals, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
