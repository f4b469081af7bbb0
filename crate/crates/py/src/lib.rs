//! Python bindings: structures, identity reports, trajectories and the
//! example checks. Reports cross the boundary as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use ricci_lab::field::RadialScalarField;
use ricci_lab::identities::{default_tolerance, identity_report, IdentityId};
use ricci_lab::lab::commands::{run_integrate, run_verify_example, IntegrateRun};
use ricci_lab::lab::config::{HModeConfig, IntegrateConfig, LabConfig};
use ricci_lab::lab::examples::{Example, ExampleConfig, ExampleName};
use ricci_lab::metric::WarpedProductMetric;
use ricci_lab::ode::first_integrals;
use ricci_lab::structure::{EinsteinTypeStructure, HMode};
use ricci_lab::LabError;

fn err(e: LabError) -> PyErr {
    match e {
        LabError::StepFailure { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_kwargs<T: serde::de::DeserializeOwned>(py: Python<'_>, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<T> {
    let text: String = match kwargs {
        Some(d) => py.import("json")?.call_method1("dumps", (d,))?.extract()?,
        None => "{}".into(),
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn h_mode(py: Python<'_>, h: &Bound<'_, PyAny>, lo: f64, hi: f64) -> PyResult<HMode> {
    let text: String = py.import("json")?.call_method1("dumps", (h,))?.extract()?;
    let c: HModeConfig = serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(match c {
        HModeConfig::Constant(v) => HMode::Constant(v),
        HModeConfig::Function { function } => {
            HMode::Function(RadialScalarField::parse(&function, lo, hi).map_err(err)?)
        }
        HModeConfig::Preset(p) => HMode::Preset(p),
    })
}

/// An Einstein-type structure `f Ric = Ddf + h g` on a radial metric.
#[pyclass(name = "Structure", module = "ricci_lab_py", frozen)]
struct PyStructure {
    inner: EinsteinTypeStructure,
}

#[pymethods]
impl PyStructure {
    /// Named example; keyword arguments as in the `example` config block.
    #[staticmethod]
    #[pyo3(signature = (name, **params))]
    fn example(py: Python<'_>, name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let cfg: ExampleConfig = from_kwargs(py, params)?;
        let ex = Example::resolve(ExampleName::parse(name).map_err(err)?, &cfg).map_err(err)?;
        Ok(PyStructure {
            inner: ex.structure().map_err(err)?,
        })
    }

    /// `dt² + b(t)² g_fiber` with `b`, `f` given as expressions in `t`.
    /// `h` is a number, `{"function": expr}` or a preset dict.
    #[staticmethod]
    #[pyo3(signature = (n, b, f, h, lo, hi, kappa0=1.0))]
    #[allow(clippy::too_many_arguments)]
    fn warped(
        py: Python<'_>,
        n: usize,
        b: &str,
        f: &str,
        h: &Bound<'_, PyAny>,
        lo: f64,
        hi: f64,
        kappa0: f64,
    ) -> PyResult<Self> {
        let b = RadialScalarField::parse(b, lo, hi).map_err(err)?;
        let f = RadialScalarField::parse(f, lo, hi).map_err(err)?;
        let metric = WarpedProductMetric::warped(n, b, kappa0).map_err(err)?;
        let inner = EinsteinTypeStructure::new(metric, f, h_mode(py, h, lo, hi)?).map_err(err)?;
        Ok(PyStructure { inner })
    }

    /// `dt²/F² + t² g_{S²}`; the potential defaults to the lapse `F`.
    #[staticmethod]
    #[pyo3(signature = (lapse, h, lo, hi, f=None))]
    fn conformal(
        py: Python<'_>,
        lapse: &str,
        h: &Bound<'_, PyAny>,
        lo: f64,
        hi: f64,
        f: Option<&str>,
    ) -> PyResult<Self> {
        let lapse = RadialScalarField::parse(lapse, lo, hi).map_err(err)?;
        let f = match f {
            Some(src) => RadialScalarField::parse(src, lo, hi).map_err(err)?,
            None => lapse.clone(),
        };
        let metric = WarpedProductMetric::conformal_radial(lapse);
        let inner = EinsteinTypeStructure::new(metric, f, h_mode(py, h, lo, hi)?).map_err(err)?;
        Ok(PyStructure { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    fn default_grid(&self) -> Vec<f64> {
        self.inner.default_grid()
    }

    /// Frame Ricci eigenvalues, scalar curvature and Hessian diagonal at `t`.
    fn curvature<'py>(&self, py: Python<'py>, t: f64) -> PyResult<Bound<'py, PyDict>> {
        let p = self.inner.point(t).map_err(err)?;
        let c = p.frame();
        let d = PyDict::new(py);
        d.set_item("r_rad", c.r_rad)?;
        d.set_item("r_tan", c.r_tan)?;
        d.set_item("s", c.s)?;
        d.set_item("f", p.f.d(0))?;
        d.set_item("h", p.h.d(0))?;
        d.set_item("ddf_rad", p.ddf_rad().d(0))?;
        d.set_item("ddf_tan", p.ddf_tan().d(0))?;
        d.set_item("laplacian_f", p.laplacian(&p.f).d(0))?;
        Ok(d)
    }

    /// Residual report of one identity over `grid` (default grid when
    /// omitted) as a dict.
    #[pyo3(signature = (identity_id, grid=None, tolerance=None))]
    fn identity<'py>(
        &self,
        py: Python<'py>,
        identity_id: &str,
        grid: Option<Vec<f64>>,
        tolerance: Option<f64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let id = IdentityId::parse(identity_id).map_err(err)?;
        let grid = grid.unwrap_or_else(|| self.inner.default_grid());
        let tol = tolerance.unwrap_or_else(|| default_tolerance(&self.inner));
        let r = identity_report(id, &self.inner, &grid, tol).map_err(err)?;
        to_py(py, &r)
    }
}

/// Result of `integrate`: states, events, ledger and classification.
#[pyclass(name = "Trajectory", module = "ricci_lab_py", frozen)]
struct PyTrajectory {
    run: IntegrateRun,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.run.trajectory.len()
    }

    #[getter]
    fn label(&self) -> &'static str {
        self.run.classification.label.name()
    }

    #[getter]
    fn reason(&self) -> Option<String> {
        self.run.classification.label.reason().map(str::to_string)
    }

    fn times(&self) -> Vec<f64> {
        self.run.trajectory.states.iter().map(|y| y.t).collect()
    }

    /// `(t, b, b', f, f')` per state.
    fn states(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        self.run
            .trajectory
            .states
            .iter()
            .map(|y| (y.t, y.b, y.bp, y.f, y.fp))
            .collect()
    }

    fn events<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.run.trajectory.events)
    }

    fn classification<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.run.classification)
    }

    fn first_integrals<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &first_integrals(&self.run.trajectory))
    }

    fn to_csv(&self) -> String {
        self.run.trajectory.to_csv()
    }

    fn structure(&self) -> PyResult<PyStructure> {
        Ok(PyStructure {
            inner: self.run.trajectory.structure().map_err(err)?,
        })
    }
}

/// Integrates the radial ODE system; keyword arguments as in the `integrate` config block.
#[pyfunction]
#[pyo3(signature = (**params))]
fn integrate(py: Python<'_>, params: Option<&Bound<'_, PyDict>>) -> PyResult<PyTrajectory> {
    let cfg: IntegrateConfig = from_kwargs(py, params)?;
    let run = py.detach(|| run_integrate(&cfg)).map_err(err)?;
    Ok(PyTrajectory { run })
}

/// Golden-value report of a named example as a dict.
#[pyfunction]
#[pyo3(signature = (name, tolerance=None, **params))]
fn verify_example<'py>(
    py: Python<'py>,
    name: &str,
    tolerance: Option<f64>,
    params: Option<&Bound<'_, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    let example: ExampleConfig = from_kwargs(py, params)?;
    let cfg = LabConfig {
        example: Some(example),
        ..Default::default()
    };
    let r = run_verify_example(name, &cfg, tolerance).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn identity_ids() -> Vec<&'static str> {
    IdentityId::ALL.iter().map(|i| i.name()).collect()
}

#[pymodule]
fn ricci_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStructure>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_example, m)?)?;
    m.add_function(wrap_pyfunction!(identity_ids, m)?)?;
    Ok(())
}
