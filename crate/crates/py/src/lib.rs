//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use tweezerforge::arraysim::{
    self, ArrayGeometry, LoadingModel, LossModel, PlanOptions, TrajectoryMode, TrialConfig, DEFAULT_PARABOLIC_APEX,
};
use tweezerforge::imaging::{self, FitOptions, TripleImageRecord};
use tweezerforge::pamol::{self, C6Scaling, PaParameters, SpectrumOptions};
use tweezerforge::qubitsim::{self, DtScan};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializes through JSON into Python builtins.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(err)
}

/// Occupancy of a tweezer grid. Text rows use `.` (empty), `1`, `2` and
/// `D` (both isotopes).
#[pyclass(module = "tweezerforge", skip_from_py_object)]
#[derive(Clone)]
struct ArrayState {
    inner: arraysim::ArrayState,
}

#[pymethods]
impl ArrayState {
    #[staticmethod]
    #[pyo3(signature = (text, pitch = 5.0))]
    fn from_text(text: &str, pitch: f64) -> PyResult<Self> {
        Ok(ArrayState { inner: arraysim::ArrayState::parse_text(text, pitch).map_err(err)? })
    }

    /// Random loading of a `rows × cols` grid.
    #[staticmethod]
    #[pyo3(signature = (rows, cols, p1 = 0.2, p2 = 0.2, p_dual = 0.002, seed = 0, pitch = 5.0))]
    fn load(rows: usize, cols: usize, p1: f64, p2: f64, p_dual: f64, seed: u64, pitch: f64) -> PyResult<Self> {
        let g = ArrayGeometry::new(rows, cols, pitch).map_err(err)?;
        let inner = arraysim::sample_loading(&g, &LoadingModel { p1, p2, p_dual, seed }).map_err(err)?;
        Ok(ArrayState { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Atoms of one kind: `"1"`, `"2"`, `"D"` or `"."`.
    fn count(&self, kind: &str) -> PyResult<usize> {
        let mut chars = kind.chars();
        match (chars.next().and_then(arraysim::Occupancy::from_char), chars.next()) {
            (Some(o), None) => Ok(self.inner.count(o)),
            _ => Err(PyValueError::new_err(format!("unknown occupancy `{kind}`"))),
        }
    }

    fn satisfies(&self, target: &TargetPattern) -> bool {
        self.inner.satisfies(&target.inner)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.geometry.rows, self.inner.geometry.cols)
    }

    fn __repr__(&self) -> String {
        format!("ArrayState(\n{})", self.inner.to_text())
    }
}

/// Wanted isotope per site: `1`, `2` or `.` (don't care).
#[pyclass(module = "tweezerforge", skip_from_py_object)]
#[derive(Clone)]
struct TargetPattern {
    inner: arraysim::TargetPattern,
}

#[pymethods]
impl TargetPattern {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(TargetPattern { inner: arraysim::TargetPattern::parse_text(text).map_err(err)? })
    }

    /// `size × size` block centred in the grid.
    #[staticmethod]
    #[pyo3(signature = (rows, cols, size, pattern = "checkerboard"))]
    fn centered(rows: usize, cols: usize, size: usize, pattern: &str) -> PyResult<Self> {
        let inner = match pattern {
            "checkerboard" => arraysim::TargetPattern::centered_checkerboard(rows, cols, size),
            "stripes" => arraysim::TargetPattern::centered_stripes(rows, cols, size),
            _ => return Err(PyValueError::new_err(format!("unknown pattern `{pattern}`"))),
        };
        Ok(TargetPattern { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }
}

fn trajectory(name: &str, apex: f64) -> PyResult<TrajectoryMode> {
    match name {
        "corridor" => Ok(TrajectoryMode::Corridor),
        "parabolic" => Ok(TrajectoryMode::Parabolic { apex }),
        _ => Err(PyValueError::new_err(format!("unknown trajectory `{name}`"))),
    }
}

/// A rearrangement plan.
#[pyclass(module = "tweezerforge")]
struct MovePlan {
    inner: arraysim::MovePlan,
}

#[pymethods]
impl MovePlan {
    #[getter]
    fn n_moves(&self) -> usize {
        self.inner.moves.len()
    }

    #[getter]
    fn n_batches(&self) -> usize {
        self.inner.n_batches
    }

    #[getter]
    fn predicted(&self) -> ArrayState {
        ArrayState { inner: self.inner.predicted.clone() }
    }

    #[getter]
    fn log(&self) -> Vec<String> {
        self.inner.log.clone()
    }

    /// Moves as dicts (cargo, src, dst, path, batch, phase, kind).
    fn moves(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner.moves)
    }
}

#[pyfunction]
#[pyo3(signature = (state, target, trajectory = "corridor", apex = DEFAULT_PARABOLIC_APEX))]
fn plan_rearrangement(state: &ArrayState, target: &TargetPattern, trajectory: &str, apex: f64) -> PyResult<MovePlan> {
    let opts = PlanOptions { trajectory: self::trajectory(trajectory, apex)?, parallel: true };
    Ok(MovePlan { inner: arraysim::plan_rearrangement(&state.inner, &target.inner, &opts).map_err(err)? })
}

/// Monte Carlo success probability of load, plan and lossy execution.
#[pyfunction]
#[pyo3(signature = (
    rows = 10, cols = 10, size = 4, pattern = "checkerboard", p1 = 0.2, p2 = 0.2, p_dual = 0.002,
    trajectory = "parabolic", apex = DEFAULT_PARABOLIC_APEX, proximity_loss = true, trials = 1000, seed = 0
))]
#[allow(clippy::too_many_arguments)]
fn success_probability(
    py: Python<'_>,
    rows: usize,
    cols: usize,
    size: usize,
    pattern: &str,
    p1: f64,
    p2: f64,
    p_dual: f64,
    trajectory: &str,
    apex: f64,
    proximity_loss: bool,
    trials: u64,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let cfg = TrialConfig {
        geometry: ArrayGeometry::new(rows, cols, 5.0).map_err(err)?,
        loading: LoadingModel { p1, p2, p_dual, seed },
        target: TargetPattern::centered(rows, cols, size, pattern)?.inner,
        plan: PlanOptions { trajectory: self::trajectory(trajectory, apex)?, parallel: true },
        loss: if proximity_loss { LossModel::proximity() } else { LossModel::default() },
    };
    let est = py.detach(|| arraysim::success_probability(&cfg, trials, seed)).map_err(err)?;
    to_py(py, &est)
}

/// Bound levels of a PA potential curve in a window (MHz).
#[pyfunction]
#[pyo3(signature = (te = vec![0.5, 1.5], window = (-1000.0, 0.0), curve = 2, params_json = None))]
fn pa_spectrum(
    py: Python<'_>,
    te: Vec<f64>,
    window: (f64, f64),
    curve: usize,
    params_json: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let p = match params_json {
        Some(t) => from_json::<PaParameters>(t)?,
        None => PaParameters::calibrated(),
    };
    let opts = SpectrumOptions { curve, ..SpectrumOptions::default() };
    let lines = py.detach(|| pamol::pa_spectrum(&p, &te, window, &opts)).map_err(err)?;
    to_py(py, &lines)
}

/// Ratio of near-threshold level densities for two linewidths.
#[pyfunction]
#[pyo3(signature = (gamma_a, gamma_b = 1.0, fixed_c6 = false))]
fn lb_density_ratio(gamma_a: f64, gamma_b: f64, fixed_c6: bool) -> f64 {
    let mode = if fixed_c6 { C6Scaling::Fixed } else { C6Scaling::GammaSquared };
    pamol::lb_density_ratio(gamma_a, gamma_b, mode)
}

/// Photon-count mixture model; parameters as a JSON object or the typical
/// 399 nm model.
#[pyclass(module = "tweezerforge", skip_from_py_object)]
#[derive(Clone)]
struct HistogramModel {
    inner: imaging::HistogramModel,
}

#[pymethods]
impl HistogramModel {
    #[new]
    #[pyo3(signature = (json = None))]
    fn new(json: Option<&str>) -> PyResult<Self> {
        let inner = match json {
            Some(t) => from_json::<imaging::HistogramModel>(t)?,
            None => imaging::HistogramModel::typical_399(),
        };
        inner.validate().map_err(err)?;
        Ok(HistogramModel { inner })
    }

    fn params(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    fn sample(&self, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        imaging::sample_histogram(&self.inner, n, seed).map_err(err)
    }

    /// Optimal threshold with its error components.
    fn optimize_threshold(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &imaging::optimize_threshold(&self.inner).map_err(err)?)
    }
}

/// Fits the mixture to counts; returns the fitted model and the full report.
#[pyfunction]
fn fit_histogram(py: Python<'_>, counts: Vec<f64>) -> PyResult<(HistogramModel, Py<PyAny>)> {
    let fit = py.detach(|| imaging::fit_histogram(&counts, &FitOptions::default())).map_err(err)?;
    Ok((HistogramModel { inner: fit.model }, to_py(py, &fit)?))
}

/// Model-free fidelity and survival from rows of three detections.
#[pyfunction]
fn model_free_fidelity(py: Python<'_>, triples: Vec<(bool, bool, bool)>) -> PyResult<Py<PyAny>> {
    let records: Vec<TripleImageRecord> = triples
        .iter()
        .enumerate()
        .map(|(i, &(b1, b2, b3))| TripleImageRecord { site: i, shot: 0, b1, b2, b3 })
        .collect();
    to_py(py, &imaging::model_free_fidelity(&records).map_err(err)?)
}

/// Synthetic three-image detections.
#[pyfunction]
#[pyo3(signature = (n_sites = 100, n_shots = 500, load = 0.5, miss = 8e-4, false_positive = 8e-4, loss = 1.2e-2, seed = 0))]
fn generate_triples(
    n_sites: usize,
    n_shots: usize,
    load: f64,
    miss: f64,
    false_positive: f64,
    loss: f64,
    seed: u64,
) -> PyResult<Vec<(bool, bool, bool)>> {
    let g = imaging::TripleGenerator { n_sites, n_shots, load, miss, false_positive, loss, seed };
    Ok(imaging::generate_triples(&g).map_err(err)?.iter().map(|r| (r.b1, r.b2, r.b3)).collect())
}

/// Built-in noise presets as dicts.
#[pyfunction]
fn presets(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_py(py, &qubitsim::presets())
}

/// Simulated fringe contrast versus hold time for a preset.
#[pyfunction]
#[pyo3(signature = (preset, times, trajectories = 2000, seed = 0))]
fn contrast_curve(
    py: Python<'_>,
    preset: &str,
    times: Vec<f64>,
    trajectories: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let p = qubitsim::preset(preset).map_err(err)?;
    let scan = DtScan::for_larmor(p.noise.larmor);
    let pts = py
        .detach(|| qubitsim::contrast_curve(p.kind, p.rabi_hz, &p.noise, &times, &scan, trajectories, seed))
        .map_err(err)?;
    to_py(py, &pts)
}

/// `A·exp(−(T/T2)^n)` least-squares fit.
#[pyfunction]
#[pyo3(signature = (t, y, sigma = None))]
fn fit_stretched_exp(py: Python<'_>, t: Vec<f64>, y: Vec<f64>, sigma: Option<Vec<f64>>) -> PyResult<Py<PyAny>> {
    to_py(py, &qubitsim::fit_stretched_exp(&t, &y, sigma.as_deref()).map_err(err)?)
}

/// Damped-sinusoid fit of a fringe.
#[pyfunction]
fn fit_damped_sinusoid(py: Python<'_>, t: Vec<f64>, y: Vec<f64>) -> PyResult<Py<PyAny>> {
    to_py(py, &qubitsim::fit_damped_sinusoid(&t, &y).map_err(err)?)
}

/// Energy conversion between hartree, MHz, joule and kelvin.
#[pyfunction]
fn convert_energy(value: f64, from: &str, to: &str) -> PyResult<f64> {
    tweezerforge::units::convert_energy_str(value, from, to).map_err(err)
}

#[pymodule]
#[pyo3(name = "tweezerforge")]
fn tweezerforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ArrayState>()?;
    m.add_class::<TargetPattern>()?;
    m.add_class::<MovePlan>()?;
    m.add_class::<HistogramModel>()?;
    m.add_function(wrap_pyfunction!(plan_rearrangement, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(pa_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(lb_density_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(fit_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(model_free_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(generate_triples, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(contrast_curve, m)?)?;
    m.add_function(wrap_pyfunction!(fit_stretched_exp, m)?)?;
    m.add_function(wrap_pyfunction!(fit_damped_sinusoid, m)?)?;
    m.add_function(wrap_pyfunction!(convert_energy, m)?)?;
    Ok(())
}
