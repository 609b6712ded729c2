//! Python bindings for `contact_bethe`.
//!
//! Matrices cross the boundary as nested lists of complex numbers, row major.

use contact_bethe::bethe::{self, boundary_residual, hyperplane_probes, random_unit_column};
use contact_bethe::bound_states::{self, BoundStateFamily, SeparatedCoupling};
use contact_bethe::boundary::{build_hspin, SeparatedSpinBC, SpinDeltaBC};
use contact_bethe::config::RunConfig;
use contact_bethe::scattering;
use contact_bethe::ybe_check;
use contact_bethe::{
    BetheState, BoundaryCondition, ComplexMatrix, ComplexVector, Coupling, NonseparatedBC,
    SeparatedBC, SpinSpace, Statistics, YOperator,
};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: contact_bethe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn statistics(name: &str) -> PyResult<Statistics> {
    match name.to_ascii_lowercase().as_str() {
        "bose" | "boson" | "bosons" => Ok(Statistics::Bose),
        "fermi" | "fermion" | "fermions" => Ok(Statistics::Fermi),
        other => Err(PyValueError::new_err(format!("unknown statistics {other:?}"))),
    }
}

fn statistics_name(s: Statistics) -> &'static str {
    match s {
        Statistics::Bose => "bose",
        Statistics::Fermi => "fermi",
    }
}

fn to_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn from_matrix(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_vector(v: &ComplexVector) -> Vec<Complex64> {
    v.iter().copied().collect()
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<PyObject> {
    let json = py.import_bound("json")?;
    Ok(json.call_method1("loads", (value.to_string(),))?.unbind())
}

/// A pair boundary condition.
#[pyclass(name = "Boundary", module = "contact_bethe_py")]
#[derive(Clone)]
pub struct PyBoundary {
    inner: BoundaryCondition,
}

#[pymethods]
impl PyBoundary {
    #[staticmethod]
    fn delta(c: f64) -> Self {
        Self { inner: BoundaryCondition::Nonseparated(NonseparatedBC::delta(c)) }
    }

    /// `d` defaults to `(1 + bc)/a`.
    #[staticmethod]
    #[pyo3(signature = (theta, a, b, c, d=None))]
    fn nonseparated(theta: f64, a: f64, b: f64, c: f64, d: Option<f64>) -> PyResult<Self> {
        let bc = match d {
            Some(d) => NonseparatedBC::new(theta, a, b, c, d),
            None => NonseparatedBC::from_theta_a_b_c(theta, a, b, c),
        }
        .map_err(err)?;
        Ok(Self { inner: BoundaryCondition::Nonseparated(bc) })
    }

    /// Symmetric separated coupling; `float('inf')` is the Dirichlet limit.
    #[staticmethod]
    fn separated(q: f64) -> Self {
        let q = if q.is_infinite() { Coupling::Infinite } else { Coupling::Finite(q) };
        Self { inner: BoundaryCondition::Separated(SeparatedBC::symmetric(q)) }
    }

    #[staticmethod]
    fn spin_delta(h: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let bc = SpinDeltaBC::new(to_matrix(h)?).map_err(err)?;
        Ok(Self { inner: BoundaryCondition::SpinDelta(bc) })
    }

    #[staticmethod]
    fn separated_spin(g: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let bc = SeparatedSpinBC::new(to_matrix(g)?).map_err(err)?;
        Ok(Self { inner: BoundaryCondition::SeparatedSpin(bc) })
    }

    /// The swap-invariant spin-1/2 coupling built from its seven parameters.
    #[staticmethod]
    fn hspin(
        a: Complex64,
        b: Complex64,
        g: f64,
        c: Complex64,
        f: Complex64,
        e1: Complex64,
        e2: Complex64,
    ) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(from_matrix(&build_hspin(a, b, g, c, f, e1, e2).map_err(err)?))
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[pyo3(signature = (tol=1e-10))]
    fn is_valid(&self, tol: f64) -> PyResult<bool> {
        Ok(self.inner.validate(tol).map_err(err)?.is_valid())
    }

    fn __repr__(&self) -> String {
        format!("Boundary({})", self.inner.name())
    }
}

/// Y-operators of a boundary on `particles` copies of `C^n`.
#[pyclass(name = "YOperator", module = "contact_bethe_py")]
#[derive(Clone)]
pub struct PyYOperator {
    inner: YOperator,
}

#[pymethods]
impl PyYOperator {
    #[new]
    #[pyo3(signature = (boundary, n, particles, statistics="bose"))]
    fn new(boundary: &PyBoundary, n: usize, particles: usize, statistics: &str) -> PyResult<Self> {
        let space = SpinSpace::new(n, particles).map_err(err)?;
        let inner = YOperator::from_boundary(&boundary.inner, space, self::statistics(statistics)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.space().n
    }

    #[getter]
    fn particles(&self) -> usize {
        self.inner.space().particles
    }

    #[getter]
    fn statistics(&self) -> &'static str {
        statistics_name(self.inner.statistics())
    }

    #[getter]
    fn interaction(&self) -> &'static str {
        self.inner.interaction().name()
    }

    /// `Y(k)` on the two-particle space.
    fn pair_matrix(&self, k: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(from_matrix(&self.inner.pair_matrix(k).map_err(err)?))
    }

    /// `Y^{ij}(k)` on the full space, zero-based particle indices.
    fn eval(&self, k: Complex64, i: usize, j: usize) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(from_matrix(&self.inner.eval(k, i, j).map_err(err)?))
    }

    /// Braid, inverse and disjoint-commutation relations; returns a dict.
    #[pyo3(signature = (samples=50, seed=42, tol=1e-10))]
    fn check_ybe(&self, py: Python<'_>, samples: usize, seed: u64, tol: f64) -> PyResult<PyObject> {
        let report = ybe_check::check_all(&self.inner, samples, seed, tol).map_err(err)?;
        json_to_py(py, &serde_json::to_value(&report).expect("reports serialize"))
    }

    /// Assembles a Bethe state from a seeded random identity-sector vector.
    #[pyo3(signature = (momenta, seed=42, tol=1e-10))]
    fn bethe_state(&self, momenta: Vec<Complex64>, seed: u64, tol: f64) -> PyResult<PyBetheState> {
        let u = random_unit_column(self.inner.space().dim(), seed);
        let inner = bethe::assemble(&self.inner, &momenta, &u, tol).map_err(err)?;
        Ok(PyBetheState { inner })
    }

    /// Factorized S-matrix at strictly ascending real momenta.
    fn smatrix(&self, momenta: Vec<f64>) -> PyResult<PySMatrix> {
        let inner = scattering::build_smatrix(&self.inner, &momenta).map_err(err)?;
        let order = scattering::order_independence_residual(&self.inner, &momenta).ok();
        Ok(PySMatrix { inner, order })
    }

    fn __repr__(&self) -> String {
        let s = self.inner.space();
        format!(
            "YOperator({}, n={}, particles={}, {})",
            self.inner.interaction().name(),
            s.n,
            s.particles,
            statistics_name(self.inner.statistics())
        )
    }
}

#[pyclass(name = "BetheState", module = "contact_bethe_py")]
pub struct PyBetheState {
    inner: BetheState,
}

#[pymethods]
impl PyBetheState {
    #[getter]
    fn path_residual(&self) -> f64 {
        self.inner.path_residual()
    }

    #[getter]
    fn energy(&self) -> Complex64 {
        self.inner.energy()
    }

    #[getter]
    fn momenta(&self) -> Vec<Complex64> {
        self.inner.momenta().to_vec()
    }

    /// Amplitude vector for the arrangement (a permutation of `0..N`).
    fn coefficient(&self, arrangement: Vec<usize>) -> PyResult<Vec<Complex64>> {
        let n = self.inner.space().particles;
        let mut sorted = arrangement.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(PyValueError::new_err(format!("{arrangement:?} is not a permutation of 0..{n}")));
        }
        Ok(from_vector(self.inner.coefficient(&arrangement)))
    }

    /// ψ(x) at a point with pairwise distinct coordinates.
    fn evaluate(&self, x: Vec<f64>) -> PyResult<Vec<Complex64>> {
        Ok(from_vector(&self.inner.evaluate(&x).map_err(err)?))
    }

    /// Largest boundary-condition defect across `x_i = x_j`.
    #[pyo3(signature = (i, j, probes=10, seed=42))]
    fn boundary_residual(&self, i: usize, j: usize, probes: usize, seed: u64) -> PyResult<f64> {
        let points = hyperplane_probes(self.inner.space().particles, i, j, probes, seed);
        let bc = self.inner.operator().interaction().boundary();
        Ok(boundary_residual(&self.inner, i, j, &bc, &points).map_err(err)?.max_residual)
    }
}

#[pyclass(name = "SMatrix", module = "contact_bethe_py")]
pub struct PySMatrix {
    inner: scattering::SMatrix,
    order: Option<f64>,
}

#[pymethods]
impl PySMatrix {
    #[getter]
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        from_matrix(&self.inner.matrix)
    }

    #[getter]
    fn word(&self) -> Vec<(usize, usize)> {
        self.inner.word.clone()
    }

    #[getter]
    fn unitarity_residual(&self) -> f64 {
        self.inner.unitarity_residual()
    }

    #[getter]
    fn symmetry_residual(&self) -> f64 {
        self.inner.symmetry_residual()
    }

    /// `None` below four particles, where only one reduced word exists.
    #[getter]
    fn order_independence_residual(&self) -> Option<f64> {
        self.order
    }

    /// Element for 1-based spin labels.
    fn element(&self, out: Vec<usize>, inp: Vec<usize>) -> PyResult<Complex64> {
        scattering::smatrix_element(&self.inner, &out, &inp).map_err(err)
    }
}

fn family_dict<'py>(py: Python<'py>, f: &BoundStateFamily) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new_bound(py);
    d.set_item("kind", format!("{:?}", f.kind))?;
    d.set_item("statistics", statistics_name(f.statistics))?;
    d.set_item("eigenvalue", f.eigenvalue)?;
    d.set_item("kappa", f.kappa)?;
    d.set_item("momenta", f.momenta.clone())?;
    d.set_item("energy", f.energy)?;
    d.set_item("degeneracy", f.degeneracy())?;
    d.set_item("spin_vectors", f.spin_vectors.iter().map(from_vector).collect::<Vec<_>>())?;
    d.set_item("sign_pattern", f.sign_pattern.clone())?;
    Ok(d)
}

/// String bound states of the spin-coupled δ interaction.
#[pyfunction]
#[pyo3(signature = (h, particles, a_param=1.0, c_param=0.0, statistics="bose"))]
fn bound_spin_delta<'py>(
    py: Python<'py>,
    h: Vec<Vec<Complex64>>,
    particles: usize,
    a_param: f64,
    c_param: f64,
    statistics: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let families =
        bound_states::bound_n_body_string(&to_matrix(h)?, particles, a_param, c_param, self::statistics(statistics)?)
            .map_err(err)?;
    families.iter().map(|f| family_dict(py, f)).collect()
}

/// Separated-family bound states for a negative scalar `q`.
#[pyfunction]
#[pyo3(signature = (q, particles, n=1, statistics="bose"))]
fn bound_separated<'py>(
    py: Python<'py>,
    q: f64,
    particles: usize,
    n: usize,
    statistics: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let states = bound_states::bound_separated(&SeparatedCoupling::Scalar(q), particles, n, self::statistics(statistics)?)
        .map_err(err)?;
    states.families.iter().map(|f| family_dict(py, f)).collect()
}

/// Energy-ordered string momenta and energy for the spin-δ family.
#[pyfunction]
fn spin_delta_string(kappa_prime: f64, particles: usize) -> (Vec<Complex64>, f64) {
    (
        bound_states::spin_delta_string(kappa_prime, particles),
        bound_states::spin_delta_energy(kappa_prime, particles),
    )
}

/// Runs a CLI subcommand on a JSON configuration and returns the report as a dict.
#[pyfunction]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<PyObject> {
    use contact_bethe::cli::{execute, Command};
    let command = match command {
        "ybe" => Command::Ybe,
        "classify-scan" => Command::ClassifyScan,
        "bethe-verify" => Command::BetheVerify,
        "bound" => Command::Bound,
        "smatrix" => Command::Smatrix,
        other => return Err(PyValueError::new_err(format!("unknown command {other:?}"))),
    };
    let cfg = RunConfig::from_json(config).map_err(err)?;
    cfg.validate().map_err(err)?;
    let report = execute(command, &cfg).map_err(err)?;
    json_to_py(py, &serde_json::to_value(&report).expect("reports serialize"))
}

#[pymodule]
fn contact_bethe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBoundary>()?;
    m.add_class::<PyYOperator>()?;
    m.add_class::<PyBetheState>()?;
    m.add_class::<PySMatrix>()?;
    m.add_function(wrap_pyfunction!(bound_spin_delta, m)?)?;
    m.add_function(wrap_pyfunction!(bound_separated, m)?)?;
    m.add_function(wrap_pyfunction!(spin_delta_string, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_conversion_round_trips() {
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(-3.0, 0.5), Complex64::new(4.0, 0.0)],
        ];
        assert_eq!(from_matrix(&to_matrix(rows.clone()).unwrap()), rows);
        assert!(to_matrix(vec![vec![Complex64::new(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn statistics_names() {
        assert_eq!(statistics("Fermi").unwrap(), Statistics::Fermi);
        assert_eq!(statistics_name(statistics("bosons").unwrap()), "bose");
        assert!(statistics("anyon").is_err());
    }
}
