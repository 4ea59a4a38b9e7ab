//! Python bindings. Matrices are nested lists, points on ℂⁿ are lists of
//! complex numbers, polynomials are dicts from exponent tuples to coefficients.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use metaplectic_core::error::Error;
use metaplectic_core::matcore::CMat;
use metaplectic_core::poly::Poly;
use metaplectic_core::suites::{self, SuiteConfig};
use metaplectic_core::sympgroup::{self, SpLieReal, SpReal, SuBlocks};
use metaplectic_core::weyl::QuadForm2n;
use metaplectic_core::{metaplectic as core_meta, moyal, quadrature, weyl};

create_exception!(metaplectic, MetaplecticError, PyValueError);
create_exception!(metaplectic, AmbiguousPhaseError, MetaplecticError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::AmbiguousPhase => AmbiguousPhaseError::new_err(e.to_string()),
        e => MetaplecticError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for Result<T, Error> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn to_cmat(rows: &[Vec<Complex64>]) -> Result<CMat, Error> {
    let r = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != cols) {
        return Err(Error::Shape("ragged matrix".into()));
    }
    let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
    CMat::from_rows(r, cols, &data)
}

fn to_real_cmat(rows: &[Vec<f64>]) -> Result<CMat, Error> {
    let c: Vec<Vec<Complex64>> =
        rows.iter().map(|r| r.iter().map(|x| Complex64::new(*x, 0.0)).collect()).collect();
    to_cmat(&c)
}

fn from_cmat(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

fn from_real_cmat(m: &CMat) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).re).collect()).collect()
}

fn check_len(v: &[impl Sized], n: usize, what: &str) -> Result<(), Error> {
    if v.len() != n {
        return Err(Error::Shape(format!("{what} has length {}, expected {n}", v.len())));
    }
    Ok(())
}

/// Element `[[P, Q], [conj Q, conj P]]` of `Sp(n,ℂ) ∩ SU(n,n)`.
#[pyclass(name = "SuElement", frozen, module = "metaplectic")]
struct PySu(SuBlocks);

#[pymethods]
impl PySu {
    #[new]
    fn new(p: Vec<Vec<Complex64>>, q: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(PySu(SuBlocks::new(to_cmat(&p).or_py()?, to_cmat(&q).or_py()?).or_py()?))
    }

    #[staticmethod]
    fn from_matrix(m: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = to_cmat(&m).or_py()?;
        let (p, q, _, _) = m.blocks().or_py()?;
        let k = SuBlocks::new(p, q).or_py()?;
        let residual = (&k.matrix() - &m).norm();
        if residual > 1e-10 * (1.0 + m.norm()) {
            return Err(py_err(Error::NotInS { residual }));
        }
        Ok(PySu(k))
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, scale = 0.8))]
    fn random(n: usize, seed: u64, scale: f64) -> Self {
        PySu(sympgroup::random_su(n, seed, scale))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        from_cmat(&self.0.matrix())
    }

    fn inverse(&self) -> Self {
        PySu(sympgroup::su_inv(&self.0))
    }

    fn __matmul__(&self, other: &PySu) -> PyResult<Self> {
        Ok(PySu(sympgroup::su_mul(&self.0, &other.0).or_py()?))
    }

    fn det_one_plus(&self) -> PyResult<f64> {
        weyl::det_one_plus(&self.0).or_py()
    }

    /// The constant `c_n(k)`; raises `AmbiguousPhaseError` when undecidable.
    fn phase(&self) -> PyResult<Complex64> {
        weyl::metaplectic_phase_c(&self.0).or_py()
    }

    fn __repr__(&self) -> String {
        format!("SuElement(n={})", self.0.n())
    }
}

/// Real symplectic matrix.
#[pyclass(name = "SpElement", frozen, module = "metaplectic")]
struct PySp(SpReal);

#[pymethods]
impl PySp {
    #[new]
    fn new(m: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PySp(SpReal::new(to_real_cmat(&m).or_py()?).or_py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, scale = 0.8))]
    fn random(n: usize, seed: u64, scale: f64) -> Self {
        PySp(sympgroup::random_sp(n, seed, scale))
    }

    /// Random element with `det(g + I) < 0`.
    #[staticmethod]
    fn random_negative(n: usize, seed: u64) -> Self {
        PySp(sympgroup::random_negative_sp(n, seed))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        from_real_cmat(self.0.matrix())
    }

    fn to_su(&self) -> PyResult<PySu> {
        Ok(PySu(sympgroup::su_from_sp(&self.0).or_py()?))
    }

    fn __repr__(&self) -> String {
        format!("SpElement(n={})", self.0.n())
    }
}

/// Element of `sp(n,ℝ)`.
#[pyclass(name = "SpLie", frozen, module = "metaplectic")]
struct PySpLie(SpLieReal);

#[pymethods]
impl PySpLie {
    #[new]
    fn new(m: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PySpLie(SpLieReal::from_matrix(&to_real_cmat(&m).or_py()?).or_py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, scale = 0.5))]
    fn random(n: usize, seed: u64, scale: f64) -> Self {
        PySpLie(sympgroup::random_sp_lie(n, seed, scale))
    }

    fn matrix(&self) -> Vec<Vec<f64>> {
        from_real_cmat(&self.0.matrix())
    }

    fn exp(&self) -> PyResult<PySp> {
        Ok(PySp(sympgroup::sp_exp(&self.0).or_py()?))
    }
}

/// Kernel of `σ(k)` at `(z, w)`.
#[pyfunction]
#[pyo3(signature = (k, z, w, lam = 1.0))]
fn sigma_kernel(k: &PySu, z: Vec<Complex64>, w: Vec<Complex64>, lam: f64) -> PyResult<Complex64> {
    check_len(&z, k.0.n(), "z").or_py()?;
    check_len(&w, k.0.n(), "w").or_py()?;
    Ok(core_meta::sigma_kernel(&k.0, lam).or_py()?.eval(&z, &w))
}

/// `(sign, scalar)` with `σ(k1)σ(k2) = scalar σ(k1 k2)`.
#[pyfunction]
#[pyo3(signature = (k1, k2, lam = 1.0))]
fn cocycle(k1: &PySu, k2: &PySu, lam: f64) -> PyResult<(i8, Complex64)> {
    let r = core_meta::sigma_cocycle_sign(&k1.0, &k2.0, lam).or_py()?;
    Ok((r.sign, r.scalar))
}

#[pyfunction]
#[pyo3(signature = (k, z, lam = 1.0))]
fn berezin_sigma(k: &PySu, z: Vec<Complex64>, lam: f64) -> PyResult<Complex64> {
    check_len(&z, k.0.n(), "z").or_py()?;
    core_meta::berezin_symbol_sigma(&k.0, &z, lam).or_py()
}

/// `W₀(σ(k))(z)`; with `adjudicate` the phase is chosen by quadrature.
#[pyfunction]
#[pyo3(signature = (k, z, lam = 1.0, adjudicate = false, nodes = None))]
fn w0_sigma(k: &PySu, z: Vec<Complex64>, lam: f64, adjudicate: bool, nodes: Option<usize>) -> PyResult<Complex64> {
    check_len(&z, k.0.n(), "z").or_py()?;
    if adjudicate {
        let nodes = nodes.unwrap_or(quadrature::default_nodes(k.0.n()));
        return Ok(weyl::adjudicate_phase(&k.0, &z, lam, nodes).or_py()?.closed_value);
    }
    weyl::w0_sigma_closed(&k.0, &z, lam).or_py()
}

#[pyfunction]
#[pyo3(signature = (k, z, lam = 1.0, nodes = None))]
fn w0_sigma_quadrature(k: &PySu, z: Vec<Complex64>, lam: f64, nodes: Option<usize>) -> PyResult<Complex64> {
    check_len(&z, k.0.n(), "z").or_py()?;
    let nodes = nodes.unwrap_or(quadrature::default_nodes(k.0.n()));
    weyl::w0_sigma_quadrature(&k.0, &z, lam, nodes).or_py()
}

#[pyfunction]
#[pyo3(signature = (g, x, y, lam = 1.0))]
fn w1_sigma(g: &PySp, x: Vec<f64>, y: Vec<f64>, lam: f64) -> PyResult<Complex64> {
    check_len(&x, g.0.n(), "x").or_py()?;
    check_len(&y, g.0.n(), "y").or_py()?;
    weyl::w1_sigma_closed(&g.0, &x, &y, lam).or_py()
}

/// `W₁(σ(exp X))(x, y)`.
#[pyfunction]
#[pyo3(signature = (x, xs, ys, lam = 1.0))]
fn w1_exp(x: &PySpLie, xs: Vec<f64>, ys: Vec<f64>, lam: f64) -> PyResult<Complex64> {
    check_len(&xs, x.0.n(), "x").or_py()?;
    check_len(&ys, x.0.n(), "y").or_py()?;
    weyl::w1_exp_closed(&x.0, &xs, &ys, lam).or_py()
}

/// `exp_∗(-i q_M)` at `point`: the closed form, or the series of the given order.
#[pyfunction]
#[pyo3(signature = (m, point, order = None))]
fn star_exp(m: Vec<Vec<f64>>, point: Vec<f64>, order: Option<usize>) -> PyResult<Complex64> {
    let q = QuadForm2n::new(to_real_cmat(&m).or_py()?).or_py()?;
    check_len(&point, 2 * q.n, "point").or_py()?;
    match order {
        None => moyal::star_exp_quadratic_closed(&q, &point).or_py(),
        Some(l) => {
            let s = moyal::star_exp_series(&q, Complex64::new(0.0, -1.0), l, &point).or_py()?;
            Ok(s.value)
        }
    }
}

fn poly_from_dict(d: &HashMap<Vec<u32>, Complex64>) -> Result<Poly, Error> {
    let nvars = d.keys().next().map_or(0, Vec::len);
    Poly::from_terms(nvars, d.iter().map(|(e, c)| (e.clone(), *c)))
}

/// Moyal product of polynomials in `(p₁..pₙ, q₁..qₙ)`.
#[pyfunction]
fn moyal_mul<'py>(
    py: Python<'py>,
    f: HashMap<Vec<u32>, Complex64>,
    g: HashMap<Vec<u32>, Complex64>,
) -> PyResult<Bound<'py, PyDict>> {
    let (f, g) = (poly_from_dict(&f).or_py()?, poly_from_dict(&g).or_py()?);
    if f.nvars() != g.nvars() || f.nvars() % 2 != 0 {
        return Err(py_err(Error::Shape("both polynomials need the same even number of variables".into())));
    }
    let out = PyDict::new(py);
    for (e, c) in moyal::moyal_mul(&f, &g).terms() {
        out.set_item(PyTuple::new(py, e)?, *c)?;
    }
    Ok(out)
}

#[pyfunction]
fn suite_names() -> Vec<&'static str> {
    suites::suite_names()
}

/// Runs a verification suite and returns its report as a dict.
#[pyfunction]
#[pyo3(signature = (name, n = 1, lam = 1.0, trials = 20, seed = 0, tol = None, nodes = None))]
#[allow(clippy::too_many_arguments)]
fn run_suite<'py>(
    py: Python<'py>,
    name: &str,
    n: usize,
    lam: f64,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    nodes: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SuiteConfig { n, lambda: lam, trials, seed, tol, nodes };
    let report = py.detach(|| suites::run_suite(name, &cfg)).or_py()?;
    py.import("json")?.call_method1("loads", (report.to_json().to_string(),))
}

#[pymodule]
fn metaplectic(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MetaplecticError", m.py().get_type::<MetaplecticError>())?;
    m.add("AmbiguousPhaseError", m.py().get_type::<AmbiguousPhaseError>())?;
    m.add_class::<PySu>()?;
    m.add_class::<PySp>()?;
    m.add_class::<PySpLie>()?;
    m.add_function(wrap_pyfunction!(sigma_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle, m)?)?;
    m.add_function(wrap_pyfunction!(berezin_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(w0_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(w0_sigma_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(w1_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(w1_exp, m)?)?;
    m.add_function(wrap_pyfunction!(star_exp, m)?)?;
    m.add_function(wrap_pyfunction!(moyal_mul, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_conversion() {
        let rows = vec![vec![Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)], vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, -1.0)]];
        let m = to_cmat(&rows).unwrap();
        assert_eq!(from_cmat(&m), rows);
        assert!(to_cmat(&[vec![Complex64::new(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn polynomial_dict() {
        let mut d = HashMap::new();
        d.insert(vec![1, 0], Complex64::new(1.0, 0.0));
        d.insert(vec![0, 2], Complex64::new(0.0, 1.0));
        let p = poly_from_dict(&d).unwrap();
        assert_eq!(p.nvars(), 2);
        assert_eq!(p.coeff(&[0, 2]), Complex64::new(0.0, 1.0));
    }
}
