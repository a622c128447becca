//! Python bindings. Exact values come back as `int` or `fractions.Fraction`,
//! enclosures as `(lower, upper)` pairs of fractions.

use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use freeqg_core::interval::Bracket;
use freeqg_core::pairings::parse_pattern;
use freeqg_core::rapid_decay::{self, Truncation};
use freeqg_core::weingarten::{GeneratorWord, Model};
use freeqg_core::{freelimit, ncpoly, qnum, Error, Weingarten};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Resource { .. } | Error::Singular { .. } | Error::SolverDiverged { .. } => {
            PyRuntimeError::new_err(err.to_string())
        }
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn model(name: &str) -> PyResult<Model> {
    match name {
        "o+" | "orthogonal" => Ok(Model::Orthogonal),
        "u+" | "unitary" => Ok(Model::Unitary),
        other => Err(PyValueError::new_err(format!("unknown model {other:?}; use 'o+' or 'u+'"))),
    }
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.numer().clone(), r.denom().clone()))
}

fn enclosure<'py>(py: Python<'py>, b: &Bracket) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    Ok((fraction(py, &b.lower())?, fraction(py, &b.upper())?))
}

fn rational(text: &str) -> PyResult<BigRational> {
    text.trim()
        .parse::<BigRational>()
        .or_else(|_| text.trim().parse::<f64>().map_err(|_| ()).and_then(|v| rapid_decay::rational_from_f64(v).map_err(|_| ())))
        .map_err(|_| PyValueError::new_err(format!("not a number: {text:?}")))
}

#[pyfunction]
fn q_int(a: u32, n: u32) -> PyResult<BigInt> {
    qnum::q_int(a, n).map_err(to_py)
}

#[pyfunction]
fn dim_irrep(k: u32, n: u32) -> PyResult<BigInt> {
    qnum::dim_irrep(k, n).map_err(to_py)
}

/// Gram matrix of noncrossing pairings as a list of rows of ints.
#[pyfunction]
#[pyo3(signature = (k, n, pattern=None))]
fn gram(k: usize, n: u32, pattern: Option<&str>) -> PyResult<Vec<Vec<BigInt>>> {
    let colors = pattern.map(parse_pattern).transpose().map_err(to_py)?;
    let g = freeqg_core::gram_matrix(k, n, colors.as_deref()).map_err(to_py)?;
    Ok((0..g.dim()).map(|i| (0..g.dim()).map(|j| g.entry(i, j)).collect()).collect())
}

/// Weingarten matrix, entries as fractions.
#[pyfunction]
#[pyo3(signature = (k, n, pattern=None))]
fn weingarten<'py>(py: Python<'py>, k: usize, n: u32, pattern: Option<&str>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let colors = pattern.map(parse_pattern).transpose().map_err(to_py)?;
    let t = Weingarten::global().table(k, n, colors.as_deref()).map_err(to_py)?;
    (0..t.dim())
        .map(|i| (0..t.dim()).map(|j| fraction(py, &t.entry(i, j))).collect())
        .collect()
}

#[pyclass(name = "Polynomial", frozen)]
struct PyPolynomial {
    inner: ncpoly::NcPolynomial,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    #[pyo3(signature = (text, model="o+"))]
    fn new(text: &str, model: &str) -> PyResult<Self> {
        let m = self::model(model)?;
        ncpoly::NcPolynomial::parse(text, m).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn model(&self) -> &'static str {
        match self.inner.model() {
            Model::Orthogonal => "o+",
            Model::Unitary => "u+",
        }
    }

    /// Replace each generator by `sqrt(N)` times itself.
    fn scaled(&self, n: u32) -> Self {
        Self { inner: self.inner.scaled_generators(n) }
    }

    fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.inner.add(&other.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.inner.sub(&other.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.inner.mul(&other.inner).map(|inner| Self { inner }).map_err(to_py)
    }

    fn __pow__(&self, m: u32, _modulo: Option<u32>) -> PyResult<Self> {
        self.inner.pow(m).map(|inner| Self { inner }).map_err(to_py)
    }

    /// State value as `(re, im)` fractions; `n=None` is the free limit.
    #[pyo3(signature = (n=None))]
    fn state<'py>(&self, py: Python<'py>, n: Option<u32>) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
        let v = self.inner.state_eval(n).map_err(to_py)?;
        Ok((fraction(py, &v.re)?, fraction(py, &v.im)?))
    }

    /// `(moment, (lower, upper))` for the `L^p` norm, `p` even.
    #[pyo3(signature = (p, n=None, bits=128))]
    fn lp_norm<'py>(&self, py: Python<'py>, p: u32, n: Option<u32>, bits: u32) -> PyResult<Bound<'py, PyAny>> {
        let v = ncpoly::lp_norm_with(Weingarten::global(), &self.inner, p, n, bits).map_err(to_py)?;
        let out = PyDict::new(py);
        out.set_item("moment", fraction(py, &v.moment)?)?;
        out.set_item("value", enclosure(py, &v.value)?)?;
        Ok(out.into_any())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial({:?}, model={:?})", self.inner.to_string(), self.model())
    }
}

/// Haar state of a word in the generators, as a fraction.
#[pyfunction]
#[pyo3(signature = (word, n, model="o+"))]
fn haar_moment<'py>(py: Python<'py>, word: &str, n: u32, model: &str) -> PyResult<Bound<'py, PyAny>> {
    let poly = ncpoly::NcPolynomial::parse(word, self::model(model)?).map_err(to_py)?;
    let letters = match poly.terms().collect::<Vec<_>>().as_slice() {
        [(letters, coef)] if **coef == ncpoly::GaussRational::one() => letters.to_vec(),
        _ => return Err(PyValueError::new_err("expected a single monomial with coefficient 1")),
    };
    let w = GeneratorWord::new(letters, poly.model()).map_err(to_py)?;
    fraction(py, &Weingarten::global().haar_moment(&w, n).map_err(to_py)?)
}

/// Free-limit moment of a word (semicircular for `x`, circular for `v`), as an int.
#[pyfunction]
#[pyo3(signature = (word, model="o+"))]
fn free_moment(word: &str, model: &str) -> PyResult<BigInt> {
    let m = self::model(model)?;
    let poly = ncpoly::NcPolynomial::parse(word, m).map_err(to_py)?;
    let terms: Vec<_> = poly.terms().collect();
    let [(letters, _)] = terms.as_slice() else {
        return Err(PyValueError::new_err("expected a single monomial"));
    };
    Ok(match m {
        Model::Orthogonal => freelimit::semicircular_moment(letters),
        Model::Unitary => freelimit::circular_moment(letters),
    }
    .into())
}

/// Scan and rigorous upper bound for `D_N`.
#[pyfunction]
#[pyo3(signature = (n, r_max=64, side_max=32))]
fn dn_constant<'py>(py: Python<'py>, n: u32, r_max: u32, side_max: u32) -> PyResult<Bound<'py, PyAny>> {
    let b = rapid_decay::dn_constant(n, Truncation { r_max, side_max }).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("n", b.n)?;
    out.set_item("value", enclosure(py, &b.value)?)?;
    out.set_item("upper", fraction(py, &b.upper())?)?;
    out.set_item("argmax", b.argmax.to_string())?;
    out.set_item("tail_error", fraction(py, &b.tail_error)?)?;
    out.set_item("product_terms", b.product_terms)?;
    Ok(out.into_any())
}

/// `(m, p)` with `p = 4m`; `epsilon` and `d_star` accept decimals or `a/b`.
#[pyfunction]
#[pyo3(signature = (degree, epsilon, d_star=None))]
fn select_p(degree: u32, epsilon: &str, d_star: Option<&str>) -> PyResult<(u64, u64)> {
    let eps = rational(epsilon)?;
    let d = match d_star {
        Some(t) => rational(t)?,
        None => rapid_decay::dn_uniform_upper_bound().map_err(to_py)?,
    };
    rapid_decay::select_p(degree, &eps, &d).map_err(to_py)
}

/// Compare `||a||_p` with the rapid-decay bound at finite `N` (normalized generators).
#[pyfunction]
fn rd_check<'py>(py: Python<'py>, poly: &PyPolynomial, n: u32, p: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
    let report = rapid_decay::rd_check(&poly.inner, n, &p).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("holds", report.holds())?;
    out.set_item("d_upper", fraction(py, &report.d_upper)?)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let row = PyDict::new(py);
            row.set_item("p", r.p)?;
            row.set_item("lhs", enclosure(py, &r.lhs)?)?;
            row.set_item("rhs", enclosure(py, &r.rhs)?)?;
            row.set_item("holds", r.holds)?;
            Ok(row)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("rows", rows)?;
    Ok(out.into_any())
}

#[pymodule]
fn freeqg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_function(wrap_pyfunction!(q_int, m)?)?;
    m.add_function(wrap_pyfunction!(dim_irrep, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(weingarten, m)?)?;
    m.add_function(wrap_pyfunction!(haar_moment, m)?)?;
    m.add_function(wrap_pyfunction!(free_moment, m)?)?;
    m.add_function(wrap_pyfunction!(dn_constant, m)?)?;
    m.add_function(wrap_pyfunction!(select_p, m)?)?;
    m.add_function(wrap_pyfunction!(rd_check, m)?)?;
    Ok(())
}
