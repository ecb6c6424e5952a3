use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use projmed_core::classifier::{self, SolutionSet};
use projmed_core::error::Error;
use projmed_core::lemma_lab::{verify_lemma_suite, Section};
use projmed_core::objective::{self, Metric, WeightedPointSet};
use projmed_core::oracle::{self, DEFAULT_GRID, DEFAULT_REFINE};
use projmed_core::projective::{self, AngleTriple, ProjectiveTriangle, UnitVector, DEFAULT_ANGLE_TOL};
use projmed_core::solver::{self, SolverConfig, SolverStatus};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn unit(v: Vec<f64>) -> PyResult<UnitVector> {
    UnitVector::normalize(v).map_err(err)
}

fn point_set(points: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> PyResult<WeightedPointSet> {
    let pts = points.into_iter().map(unit).collect::<PyResult<Vec<_>>>()?;
    match weights {
        Some(w) => WeightedPointSet::new(pts, w),
        None => WeightedPointSet::uniform(pts),
    }
    .map_err(err)
}

fn metric(name: &str) -> PyResult<Metric> {
    name.parse().map_err(err)
}

fn coords(v: &UnitVector) -> Vec<f64> {
    v.as_slice().to_vec()
}

/// Three lines in R^3, sign-normalized and ordered by pairwise angle.
#[pyclass(frozen, name = "Triangle")]
struct PyTriangle(ProjectiveTriangle);

#[pymethods]
impl PyTriangle {
    /// Canonical triangle with the given pairwise angles in degrees.
    #[staticmethod]
    fn from_angles(d1: f64, d2: f64, d3: f64) -> PyResult<Self> {
        let t = AngleTriple::from_degrees(d1, d2, d3).map_err(err)?;
        Ok(PyTriangle(projective::triangle_from_angles(&t).map_err(err)?))
    }

    #[staticmethod]
    fn from_points(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> PyResult<Self> {
        let t = projective::normalize_signs([unit(a)?, unit(b)?, unit(c)?]).map_err(err)?;
        Ok(PyTriangle(t))
    }

    /// `(phi_ab, phi_ac, phi_bc)` in degrees.
    #[getter]
    fn angles(&self) -> (f64, f64, f64) {
        let [x, y, z] = self.0.angles().to_degrees();
        (x, y, z)
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.0.vertices().iter().map(|v| coords(v)).collect()
    }

    fn is_big(&self) -> bool {
        projective::is_big(&self.0)
    }

    /// Objective values at A, B, C.
    fn vertex_objectives(&self) -> (f64, f64, f64) {
        let [a, b, c] = classifier::vertex_objective_table(&self.0);
        (a, b, c)
    }

    fn centroid(&self) -> PyResult<Vec<f64>> {
        Ok(coords(&projective::centroid(&self.0).map_err(err)?))
    }

    #[pyo3(signature = (tol = DEFAULT_ANGLE_TOL))]
    fn classify(&self, tol: f64) -> PyResult<PySolutionSet> {
        Ok(PySolutionSet(classifier::classify(&self.0, tol).map_err(err)?))
    }

    fn __repr__(&self) -> String {
        let (x, y, z) = self.angles();
        format!("Triangle(phi_ab={x:.6}, phi_ac={y:.6}, phi_bc={z:.6})")
    }
}

#[pyclass(frozen, name = "SolutionSet")]
struct PySolutionSet(SolutionSet);

#[pymethods]
impl PySolutionSet {
    #[getter]
    fn coverage(&self) -> String {
        self.0.coverage.to_string()
    }

    /// Labels joined with `+`, e.g. `"A+B+C"`.
    #[getter]
    fn winner(&self) -> String {
        self.0.winner_string()
    }

    /// `[(label, point, value), ...]`
    #[getter]
    fn members(&self) -> Vec<(String, Vec<f64>, f64)> {
        self.0.members.iter().map(|m| (m.label.to_string(), coords(&m.point), m.value)).collect()
    }

    fn is_covered(&self) -> bool {
        self.0.is_covered()
    }

    fn __repr__(&self) -> String {
        format!("SolutionSet(winner={:?}, coverage={})", self.winner(), self.coverage())
    }
}

#[pyclass(frozen, get_all, name = "SolverResult")]
struct PySolverResult {
    minimizer: Vec<f64>,
    value: f64,
    residual: f64,
    /// `"interior"`, `"vertex"` or `"max_iters"`.
    status: String,
    /// Index of the data point for vertex minimizers.
    vertex: Option<usize>,
    iterations: usize,
}

#[pymethods]
impl PySolverResult {
    fn __repr__(&self) -> String {
        format!("SolverResult(value={:.12}, status={:?})", self.value, self.status)
    }
}

#[pyclass(frozen, get_all, name = "CertifiedBound")]
struct PyCertifiedBound {
    lower: f64,
    upper: f64,
    argmin: Vec<f64>,
    resolution: f64,
    certified: bool,
}

#[pymethods]
impl PyCertifiedBound {
    #[pyo3(signature = (value, slack = 0.0))]
    fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    fn __repr__(&self) -> String {
        format!("CertifiedBound([{:.12}, {:.12}], certified={})", self.lower, self.upper, self.certified)
    }
}

#[pyfunction]
fn sine_distance(p: Vec<f64>, q: Vec<f64>) -> PyResult<f64> {
    projective::sine_distance(&unit(p)?, &unit(q)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (points, p, weights = None, metric = "sine"))]
fn evaluate(points: Vec<Vec<f64>>, p: Vec<f64>, weights: Option<Vec<f64>>, metric: &str) -> PyResult<f64> {
    let ps = point_set(points, weights)?;
    objective::evaluate(&ps, &unit(p)?, self::metric(metric)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (points, p, weights = None))]
fn gradient(points: Vec<Vec<f64>>, p: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
    let ps = point_set(points, weights)?;
    Ok(objective::riemannian_gradient(&ps, &unit(p)?).map_err(err)?.direction)
}

#[pyfunction]
#[pyo3(signature = (points, weights = None, metric = "sine", seed = 0, restarts = 16, max_iters = 5000))]
fn solve(
    py: Python<'_>,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    metric: &str,
    seed: u64,
    restarts: usize,
    max_iters: usize,
) -> PyResult<PySolverResult> {
    let ps = point_set(points, weights)?;
    let cfg = SolverConfig { seed, restarts, max_iters, metric: self::metric(metric)?, ..SolverConfig::default() };
    let r = py.detach(|| solver::solve(&ps, &cfg)).map_err(err)?;
    let (status, vertex) = match r.status {
        SolverStatus::Interior => ("interior", None),
        SolverStatus::Vertex(i) => ("vertex", Some(i)),
        SolverStatus::MaxIters => ("max_iters", None),
    };
    Ok(PySolverResult {
        minimizer: coords(&r.minimizer),
        value: r.value,
        residual: r.residual,
        status: status.to_string(),
        vertex,
        iterations: r.trace.last().map_or(0, |t| t.iter),
    })
}

/// Grid bound on the global minimum; dimension 3 only.
#[pyfunction]
#[pyo3(signature = (points, weights = None, grid = DEFAULT_GRID, refine = DEFAULT_REFINE))]
fn certified_min(
    py: Python<'_>,
    points: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    grid: usize,
    refine: usize,
) -> PyResult<PyCertifiedBound> {
    let ps = point_set(points, weights)?;
    let cb = py.detach(|| oracle::certified_min(&ps, grid, refine)).map_err(err)?;
    Ok(PyCertifiedBound {
        lower: cb.lower,
        upper: cb.upper,
        argmin: coords(&cb.argmin_cell),
        resolution: cb.resolution.0,
        certified: cb.certified,
    })
}

type ReportRow = (String, usize, f64, usize);

/// Runs one lemma suite. Returns `(passed, [(name, trials, max_rel_residual, violations), ...])`.
#[pyfunction]
#[pyo3(signature = (suite, seed = 1, trials = 100))]
fn verify(py: Python<'_>, suite: &str, seed: u64, trials: usize) -> PyResult<(bool, Vec<ReportRow>)> {
    let section: Section = suite.parse().map_err(err)?;
    let rep = py.detach(|| verify_lemma_suite(section, seed, trials)).map_err(err)?;
    let rows = rep.reports.iter().map(|r| (r.name.clone(), r.trials, r.max_rel_residual, r.violations)).collect();
    Ok((rep.passed(), rows))
}

/// Reduced equilateral objective `J(w)` for parameter `alpha`.
#[pyfunction]
fn reduced_j(alpha: f64, w: f64) -> f64 {
    objective::reduced_j(alpha, w)
}

#[pymodule]
fn projmed(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTriangle>()?;
    m.add_class::<PySolutionSet>()?;
    m.add_class::<PySolverResult>()?;
    m.add_class::<PyCertifiedBound>()?;
    m.add_function(wrap_pyfunction!(sine_distance, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(gradient, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(certified_min, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_j, m)?)?;
    Ok(())
}
