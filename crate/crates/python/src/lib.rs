//! Python bindings: families, word utilities, the superstable solver, lap
//! counting, and the sweep, mirroring the Rust API with Python-native
//! containers. Usage mistakes raise ValueError; numeric failures raise
//! RuntimeError.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use kneading::{
    Branch, EntropyError, EntropyOptions, FamilyError, LevelError, LevelFunction, SweepOptions,
    UnimodalFamily, Word, WordError,
};

fn family_py_err(e: FamilyError) -> PyErr {
    match e {
        FamilyError::DomainViolation { .. } | FamilyError::SingularPoint { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn word_py_err(e: WordError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn level_py_err(e: LevelError) -> PyErr {
    match e {
        LevelError::Family(inner) => family_py_err(inner),
        LevelError::SolveFailure { .. } | LevelError::OrbitResidual { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn entropy_py_err(e: EntropyError) -> PyErr {
    match e {
        EntropyError::Family(inner) => family_py_err(inner),
        EntropyError::BadParameter { .. } => PyValueError::new_err(e.to_string()),
        EntropyError::CapExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_branch(text: &str) -> PyResult<Branch> {
    Branch::parse(text)
        .ok_or_else(|| PyValueError::new_err(format!("branch must be L or R, got \"{text}\"")))
}

/// Builds the level function for either a C-free stem ("RLL") or a full
/// kneading word ("RLLC"); both address the same composition.
fn level_fn(family: &UnimodalFamily, word: &str) -> PyResult<LevelFunction> {
    if word.ends_with('C') {
        let parsed = Word::parse(word).map_err(word_py_err)?;
        LevelFunction::from_kneading_word(family, &parsed).map_err(level_py_err)
    } else {
        LevelFunction::parse(family, word).map_err(level_py_err)
    }
}

/// A scaled unimodal map family mu * f with the built-in shapes.
#[pyclass(frozen, module = "kneading_py")]
struct Family {
    inner: UnimodalFamily,
}

#[pymethods]
impl Family {
    #[new]
    fn new(name: &str) -> PyResult<Family> {
        UnimodalFamily::by_name(name).map(|inner| Family { inner }).ok_or_else(|| {
            PyValueError::new_err(format!(
                "unknown family \"{name}\"; built-ins: {}",
                UnimodalFamily::BUILTIN_NAMES.join(", ")
            ))
        })
    }

    #[staticmethod]
    fn logistic() -> Family {
        Family { inner: UnimodalFamily::logistic() }
    }

    #[staticmethod]
    fn sine() -> Family {
        Family { inner: UnimodalFamily::sine() }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    fn eval(&self, mu: f64, x: f64) -> PyResult<f64> {
        self.inner.eval(mu, x).map_err(family_py_err)
    }

    fn iterate(&self, mu: f64, x: f64, n: usize) -> PyResult<f64> {
        self.inner.iterate(mu, x, n).map_err(family_py_err)
    }

    #[pyo3(signature = (mu, x, depth, tol_c = 1e-9))]
    fn itinerary(&self, mu: f64, x: f64, depth: usize, tol_c: f64) -> PyResult<String> {
        self.inner.itinerary(mu, x, depth, tol_c).map(|w| w.to_string()).map_err(family_py_err)
    }

    #[pyo3(signature = (mu, depth, tol_c = 1e-9))]
    fn kneading_sequence(&self, mu: f64, depth: usize, tol_c: f64) -> PyResult<String> {
        self.inner.kneading_sequence(mu, depth, tol_c).map(|w| w.to_string()).map_err(family_py_err)
    }

    fn inverse_branch(&self, mu: f64, branch: &str, y: f64) -> PyResult<f64> {
        self.inner.inverse_branch(mu, parse_branch(branch)?, y).map_err(family_py_err)
    }

    fn schwarzian(&self, x: f64) -> PyResult<f64> {
        self.inner.schwarzian(x).map_err(family_py_err)
    }

    fn schwarzian_inverse_branch(&self, mu: f64, branch: &str, y: f64) -> PyResult<f64> {
        self.inner
            .schwarzian_inverse_branch(mu, parse_branch(branch)?, y)
            .map_err(family_py_err)
    }

    #[pyo3(signature = (mu_min = 0.5, mu_max = 1.0, mu_points = 50, x_points = 100))]
    fn check_class_c(
        &self,
        mu_min: f64,
        mu_max: f64,
        mu_points: usize,
        x_points: usize,
    ) -> PyResult<CheckResult> {
        if mu_points < 2 || x_points < 1 {
            return Err(PyValueError::new_err("need mu_points >= 2 and x_points >= 1"));
        }
        let mu_grid = kneading::linspace(mu_min, mu_max, mu_points);
        let x_grid = kneading::interior_grid(x_points);
        let report = self.inner.check_class_c(&mu_grid, &x_grid).map_err(family_py_err)?;
        Ok(CheckResult {
            family: report.family.clone(),
            unique_fixed_point: report.unique_fixed_point,
            negative_schwarzian: report.negative_schwarzian,
            positive_inverse_schwarzian: report.positive_inverse_schwarzian,
            passed: report.passed(),
            witnesses: report
                .witnesses
                .iter()
                .map(|w| (w.property, w.mu, w.point, w.value))
                .collect(),
        })
    }

    fn __repr__(&self) -> String {
        format!("Family({:?})", self.inner.name())
    }
}

/// Superstable parameter for one kneading word, with solve evidence.
#[pyclass(frozen, module = "kneading_py")]
struct SolveResult {
    #[pyo3(get)]
    word: String,
    #[pyo3(get)]
    mu_star: f64,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    bracket_width: f64,
}

#[pymethods]
impl SolveResult {
    fn __repr__(&self) -> String {
        format!("SolveResult(word={:?}, mu_star={})", self.word, self.mu_star)
    }
}

/// Lap counts and the growth-rate entropy estimate at one parameter.
#[pyclass(frozen, module = "kneading_py")]
struct EntropyResult {
    #[pyo3(get)]
    mu: f64,
    #[pyo3(get)]
    h_estimate: f64,
    #[pyo3(get)]
    depth_reached: usize,
    #[pyo3(get)]
    cap_hit: bool,
    #[pyo3(get)]
    lap_counts: Vec<u64>,
}

#[pymethods]
impl EntropyResult {
    fn __repr__(&self) -> String {
        format!("EntropyResult(mu={}, h_estimate={})", self.mu, self.h_estimate)
    }
}

/// Grid sweep outcome: points as (mu, word, entropy, lap_depth) tuples and
/// the monotonicity violations as rendered strings.
#[pyclass(frozen, module = "kneading_py")]
struct SweepResult {
    #[pyo3(get)]
    family: String,
    #[pyo3(get)]
    points: Vec<(f64, String, Option<f64>, Option<usize>)>,
    #[pyo3(get)]
    kneading_violations: Vec<String>,
    #[pyo3(get)]
    entropy_violations: Vec<String>,
    #[pyo3(get)]
    max_entropy_drop: f64,
    #[pyo3(get)]
    clean: bool,
}

#[pymethods]
impl SweepResult {
    fn __repr__(&self) -> String {
        format!(
            "SweepResult(family={:?}, points={}, clean={})",
            self.family,
            self.points.len(),
            self.clean
        )
    }
}

/// Outcome of the family property check; witnesses are
/// (property, mu, point, value) tuples.
#[pyclass(frozen, module = "kneading_py")]
struct CheckResult {
    #[pyo3(get)]
    family: String,
    #[pyo3(get)]
    unique_fixed_point: bool,
    #[pyo3(get)]
    negative_schwarzian: bool,
    #[pyo3(get)]
    positive_inverse_schwarzian: bool,
    #[pyo3(get)]
    passed: bool,
    #[pyo3(get)]
    witnesses: Vec<(u8, f64, f64, f64)>,
}

#[pymethods]
impl CheckResult {
    fn __repr__(&self) -> String {
        format!("CheckResult(family={:?}, passed={})", self.family, self.passed)
    }
}

#[pyfunction]
fn mobius(d: u64) -> PyResult<i64> {
    kneading::mobius(d).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn count_kneading(n: u32) -> PyResult<u64> {
    kneading::count_kneading(n).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn enumerate_kneading(n: u32) -> PyResult<Vec<String>> {
    kneading::enumerate_kneading(n)
        .map(|census| census.words.iter().map(|w| w.to_string()).collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Parity-lexicographic comparison: -1, 0, or 1.
#[pyfunction]
fn compare_words(a: &str, b: &str) -> PyResult<i32> {
    let a = Word::parse(a).map_err(word_py_err)?;
    let b = Word::parse(b).map_err(word_py_err)?;
    a.compare_parity_lex(&b)
        .map(|o| o as i32)
        .map_err(word_py_err)
}

#[pyfunction]
fn is_shift_maximal(word: &str) -> PyResult<bool> {
    Ok(Word::parse(word).map_err(word_py_err)?.is_shift_maximal())
}

/// Value of the inverse-branch composition along the word at parameter mu.
#[pyfunction]
fn level_eval(family: PyRef<Family>, word: &str, mu: f64) -> PyResult<f64> {
    level_fn(&family.inner, word)?.eval(mu).map_err(level_py_err)
}

#[pyfunction]
fn domain_lower_bound(family: PyRef<Family>, word: &str) -> PyResult<f64> {
    level_fn(&family.inner, word)?.domain_lower_bound().map_err(level_py_err)
}

#[pyfunction]
fn solve_superstable(family: PyRef<Family>, word: &str) -> PyResult<SolveResult> {
    let parsed = Word::parse(word).map_err(word_py_err)?;
    let record = kneading::solve_superstable(&family.inner, &parsed).map_err(level_py_err)?;
    Ok(SolveResult {
        word: record.word.to_string(),
        mu_star: record.mu_star,
        residual: record.residual,
        bracket_width: record.bracket_width,
    })
}

#[pyfunction]
fn superstable_table(family: PyRef<Family>, n_max: u32) -> PyResult<Vec<SolveResult>> {
    let records = kneading::superstable_table(&family.inner, n_max).map_err(level_py_err)?;
    Ok(records
        .into_iter()
        .map(|r| SolveResult {
            word: r.word.to_string(),
            mu_star: r.mu_star,
            residual: r.residual,
            bracket_width: r.bracket_width,
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (family, word, mu1, mu2, depth = 25))]
fn realize_ivt(
    family: PyRef<Family>,
    word: &str,
    mu1: f64,
    mu2: f64,
    depth: usize,
) -> PyResult<f64> {
    let parsed = Word::parse(word).map_err(word_py_err)?;
    kneading::realize_ivt(&family.inner, &parsed, mu1, mu2, depth).map_err(level_py_err)
}

#[pyfunction]
#[pyo3(signature = (family, mu, n, node_cap = 2_000_000))]
fn lap_count(family: PyRef<Family>, mu: f64, n: usize, node_cap: usize) -> PyResult<u64> {
    kneading::lap_count(&family.inner, mu, n, node_cap).map_err(entropy_py_err)
}

#[pyfunction]
#[pyo3(signature = (family, mu, max_depth = 3000, node_cap = 2_000_000))]
fn entropy(family: PyRef<Family>, mu: f64, max_depth: usize, node_cap: usize) -> PyResult<EntropyResult> {
    let opts = EntropyOptions { max_depth, node_cap };
    let report = kneading::entropy_estimate(&family.inner, mu, opts).map_err(entropy_py_err)?;
    Ok(EntropyResult {
        mu: report.mu,
        h_estimate: report.h_estimate,
        depth_reached: report.depth_reached,
        cap_hit: report.cap_hit,
        lap_counts: report.lap_counts,
    })
}

#[pyfunction]
#[pyo3(signature = (
    family,
    mu_min = 0.5,
    mu_max = 1.0,
    grid_points = 1000,
    depth = 25,
    entropy = false,
    entropy_tolerance = 5e-3,
    tree_depth = 3000,
    node_cap = 2_000_000,
))]
#[allow(clippy::too_many_arguments)]
fn sweep(
    family: PyRef<Family>,
    mu_min: f64,
    mu_max: f64,
    grid_points: usize,
    depth: usize,
    entropy: bool,
    entropy_tolerance: f64,
    tree_depth: usize,
    node_cap: usize,
) -> PyResult<SweepResult> {
    let opts = SweepOptions {
        mu_min,
        mu_max,
        grid_points,
        depth,
        entropy_tolerance,
        entropy: EntropyOptions { max_depth: tree_depth, node_cap },
        compute_entropy: entropy,
        ..SweepOptions::default()
    };
    let report = kneading::sweep(&family.inner, &opts).map_err(entropy_py_err)?;
    Ok(SweepResult {
        family: report.family.clone(),
        points: report
            .points
            .iter()
            .map(|p| (p.mu, p.word.to_string(), p.entropy, p.lap_depth))
            .collect(),
        kneading_violations: report.kneading_violations.iter().map(|v| v.detail.clone()).collect(),
        entropy_violations: report.entropy_violations.iter().map(|v| v.detail.clone()).collect(),
        max_entropy_drop: report.max_entropy_drop,
        clean: report.clean(),
    })
}

#[pymodule]
fn kneading_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Family>()?;
    m.add_class::<SolveResult>()?;
    m.add_class::<EntropyResult>()?;
    m.add_class::<SweepResult>()?;
    m.add_class::<CheckResult>()?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(count_kneading, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_kneading, m)?)?;
    m.add_function(wrap_pyfunction!(compare_words, m)?)?;
    m.add_function(wrap_pyfunction!(is_shift_maximal, m)?)?;
    m.add_function(wrap_pyfunction!(level_eval, m)?)?;
    m.add_function(wrap_pyfunction!(domain_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(solve_superstable, m)?)?;
    m.add_function(wrap_pyfunction!(superstable_table, m)?)?;
    m.add_function(wrap_pyfunction!(realize_ivt, m)?)?;
    m.add_function(wrap_pyfunction!(lap_count, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
