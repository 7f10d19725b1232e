//! Python bindings: `compress`, `decompress`, `analyze`, and the
//! `Representation` view of the transform.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};

use cdmpm_core::analysis::{self, RedundancyReport};
use cdmpm_core::transform::{self, MultilevelRepresentation, Token};
use cdmpm_core::{codec, Alphabet, Error, Mode};

create_exception!(cdmpm, CorruptContainerError, PyException);
create_exception!(cdmpm, DesyncError, CorruptContainerError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Corrupt(_) => CorruptContainerError::new_err(err.to_string()),
        Error::Desync(_) => DesyncError::new_err(err.to_string()),
        Error::Io(e) => e.into(),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Transform parameters. `levels` is clamped to floor(log_r n) per input.
#[pyclass(frozen, eq, hash, from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    inner: cdmpm_core::Params,
}

#[pymethods]
impl Params {
    #[new]
    #[pyo3(signature = (r = 2, levels = 24, mode = "cdmpm"))]
    fn new(r: u32, levels: u32, mode: &str) -> PyResult<Self> {
        let mode: Mode = mode.parse().map_err(to_py)?;
        let inner = cdmpm_core::Params::new(r, levels, mode).map_err(to_py)?;
        Ok(Params { inner })
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r()
    }

    #[getter]
    fn levels(&self) -> u32 {
        self.inner.levels()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(r={}, levels={}, mode='{}')",
            self.inner.r(),
            self.inner.levels(),
            self.inner.mode()
        )
    }
}

fn params_or_default(params: Option<Params>) -> cdmpm_core::Params {
    params.map(|p| p.inner).unwrap_or_else(|| {
        cdmpm_core::Params::new(2, 24, Mode::Cdmpm).expect("default parameters are valid")
    })
}

/// Python value of a token: "s*", "s", a repeat index, or a level-0 byte.
fn token_object<'py>(py: Python<'py>, token: Token) -> PyResult<Bound<'py, PyAny>> {
    Ok(match token {
        Token::S { forced: true } => "s*".into_pyobject(py)?.into_any(),
        Token::S { forced: false } => "s".into_pyobject(py)?.into_any(),
        Token::Repeat(m) => m.into_pyobject(py)?.into_any(),
        Token::Symbol(b) => PyBytes::new(py, &[b]).into_any(),
    })
}

/// The multilevel representation of one input.
#[pyclass(frozen)]
pub struct Representation {
    inner: MultilevelRepresentation,
}

#[pymethods]
impl Representation {
    #[new]
    #[pyo3(signature = (data, params = None))]
    fn new(data: &[u8], params: Option<Params>) -> PyResult<Self> {
        let inner = transform::build_multilevel(data, params_or_default(params), &Alphabet::infer(data))
            .map_err(to_py)?;
        Ok(Representation { inner })
    }

    #[getter]
    fn top_level(&self) -> u32 {
        self.inner.top_level()
    }

    #[getter]
    fn alphabet<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, self.inner.alphabet().symbols())
    }

    /// Level lengths n_i, top level first.
    fn level_lengths(&self) -> Vec<usize> {
        self.inner.lengths().descending().map(|(_, len)| len).collect()
    }

    fn blocks<'py>(&self, py: Python<'py>, level: u32) -> PyResult<Bound<'py, PyList>> {
        self.check_level(level)?;
        let n = self.inner.level(level).len();
        PyList::new(py, (0..n).map(|j| PyBytes::new(py, self.inner.block(level, j))))
    }

    /// Class labels; on level 0 the context byte values.
    fn labels(&self, level: u32) -> PyResult<Vec<u32>> {
        self.check_level(level)?;
        Ok(self.inner.level(level).labels.clone())
    }

    fn tokens<'py>(&self, py: Python<'py>, level: u32) -> PyResult<Bound<'py, PyList>> {
        self.check_level(level)?;
        let items = self
            .inner
            .level(level)
            .tokens
            .iter()
            .map(|&t| token_object(py, t))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, items)
    }

    /// Depth-first stream as `(level, label, token)` tuples; `coded_only`
    /// drops the forced `s` entries.
    #[pyo3(signature = (coded_only = false))]
    fn flatten<'py>(&self, py: Python<'py>, coded_only: bool) -> PyResult<Bound<'py, PyList>> {
        let flat = self.inner.flatten();
        let items = flat
            .entries
            .iter()
            .filter(|e| !coded_only || !e.token.is_forced())
            .map(|e| (e.level, e.label, token_object(py, e.token)?).into_pyobject(py))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, items)
    }

    fn expand<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let data = self.inner.expand().map_err(to_py)?;
        Ok(PyBytes::new(py, &data))
    }

    fn grammar(&self) -> String {
        self.inner.grammar().to_string()
    }

    fn trace(&self) -> String {
        transform::render_trace(&self.inner)
    }

    /// Conditional empirical entropy of the grammar, in bits.
    fn entropy(&self) -> f64 {
        analysis::grammar_entropy(&self.inner).total_bits
    }

    /// Per-level statistics, top level first.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .levels()
            .map(|seq| {
                let s = analysis::level_stats(seq);
                let d = PyDict::new(py);
                d.set_item("level", s.level)?;
                d.set_item("l", s.coded)?;
                d.set_item("f_s", s.s_count)?;
                d.set_item("blocks", s.blocks)?;
                d.set_item("classes", s.classes)?;
                d.set_item("entropy_bits", analysis::level_entropy(seq))?;
                Ok(d)
            })
            .collect()
    }
}

impl Representation {
    fn check_level(&self, level: u32) -> PyResult<()> {
        if level > self.inner.top_level() {
            return Err(PyValueError::new_err(format!(
                "level {level} above top level {}",
                self.inner.top_level()
            )));
        }
        Ok(())
    }
}

/// Entropy and redundancy measurements for one compressed input.
#[pyclass(frozen)]
pub struct Report {
    inner: RedundancyReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn i_eff(&self) -> u32 {
        self.inner.i_eff
    }

    #[getter]
    fn payload_bits(&self) -> u64 {
        self.inner.payload_bits
    }

    #[getter]
    fn ideal_bits(&self) -> f64 {
        self.inner.ideal_bits
    }

    #[getter]
    fn bits_per_symbol(&self) -> f64 {
        self.inner.bits_per_symbol()
    }

    #[getter]
    fn h_g_bits(&self) -> f64 {
        self.inner.h_g_bits
    }

    #[getter]
    fn h1_bits_per_symbol(&self) -> f64 {
        self.inner.h1_bits_per_symbol
    }

    #[getter]
    fn lemma_rhs_bits(&self) -> f64 {
        self.inner.lemma_rhs_bits
    }

    #[getter]
    fn lemma_pass(&self) -> bool {
        self.inner.lemma_pass()
    }

    #[getter]
    fn theorem_c(&self) -> Option<f64> {
        self.inner.theorem_c
    }

    #[getter]
    fn theorem_bound(&self) -> Option<f64> {
        self.inner.theorem_bound()
    }

    #[getter]
    fn redundancy(&self) -> f64 {
        self.inner.redundancy()
    }

    #[getter]
    fn theorem_pass(&self) -> Option<bool> {
        self.inner.theorem_pass()
    }

    #[getter]
    fn sum_l(&self) -> usize {
        self.inner.sum_coded()
    }

    #[getter]
    fn sum_l_pass(&self) -> Option<bool> {
        self.inner.sum_coded_pass()
    }

    /// `l_i` keyed by level.
    #[getter]
    fn l(&self) -> Vec<(u32, usize)> {
        self.inner.levels.iter().map(|s| (s.level, s.coded)).collect()
    }

    /// `f_i^s` keyed by level.
    #[getter]
    fn f_s(&self) -> Vec<(u32, usize)> {
        self.inner.levels.iter().map(|s| (s.level, s.s_count)).collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyfunction]
#[pyo3(signature = (data, params = None))]
fn compress<'py>(py: Python<'py>, data: &[u8], params: Option<Params>) -> PyResult<Bound<'py, PyBytes>> {
    let params = params_or_default(params);
    let bytes = py.detach(|| codec::compress(data, params)).map_err(to_py)?;
    Ok(PyBytes::new(py, &bytes))
}

#[pyfunction]
fn decompress<'py>(py: Python<'py>, data: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
    let out = py.detach(|| codec::decompress(data)).map_err(to_py)?;
    Ok(PyBytes::new(py, &out))
}

/// Header fields of a container: `(r, levels, mode, n, alphabet)`.
#[pyfunction]
fn parse_header<'py>(py: Python<'py>, data: &[u8]) -> PyResult<(u32, u32, String, u64, Bound<'py, PyBytes>)> {
    let h = codec::parse_header(data).map_err(to_py)?;
    Ok((
        h.params.r(),
        h.params.levels(),
        h.params.mode().to_string(),
        h.n,
        PyBytes::new(py, h.alphabet.symbols()),
    ))
}

#[pyfunction]
#[pyo3(signature = (data, params = None, k = 1))]
fn analyze(py: Python<'_>, data: &[u8], params: Option<Params>, k: u32) -> PyResult<Report> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    let params = params_or_default(params);
    let inner = py
        .detach(|| analysis::redundancy_report(data, params, k))
        .map_err(to_py)?;
    Ok(Report { inner })
}

/// Order-1 empirical entropy in bits per symbol.
#[pyfunction]
fn order1_entropy(data: &[u8]) -> f64 {
    analysis::order1_entropy(data, &Alphabet::infer(data))
}

#[pyfunction]
#[pyo3(signature = (r, alphabet_size, k = 1))]
fn theorem_constant(r: u32, alphabet_size: usize, k: u32) -> PyResult<Option<f64>> {
    if r < 2 || k < 1 {
        return Err(PyValueError::new_err("need r >= 2 and k >= 1"));
    }
    Ok(analysis::theorem_constant(r, k, alphabet_size))
}

/// Level lengths n_i for an input of `n` symbols, top level first.
#[pyfunction]
fn rary_expansion(n: usize, r: u32, levels: u32) -> PyResult<Vec<usize>> {
    if r < 2 {
        return Err(PyValueError::new_err("r must be at least 2"));
    }
    Ok(cdmpm_core::rary_expansion(n, r, levels)
        .descending()
        .map(|(_, len)| len)
        .collect())
}

/// Context-dependent multilevel pattern matching compressor.
#[pymodule]
pub fn cdmpm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<Representation>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(compress, m)?)?;
    m.add_function(wrap_pyfunction!(decompress, m)?)?;
    m.add_function(wrap_pyfunction!(parse_header, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(order1_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_constant, m)?)?;
    m.add_function(wrap_pyfunction!(rary_expansion, m)?)?;
    m.add("CorruptContainerError", m.py().get_type::<CorruptContainerError>())?;
    m.add("DesyncError", m.py().get_type::<DesyncError>())?;
    Ok(())
}
