//! Python bindings for axisprobe.

use axisprobe::antonym::{alignment_ranking, AntonymPair};
use axisprobe::axis::{build_axis, AxisSpec as CoreAxisSpec, CulturalAxis, PoleSpec};
use axisprobe::lexicon::{LexiconKind, SentimentLexicon};
use axisprobe::screening::{excision_experiment, ExcisionConfig, ScreenOptions};
use axisprobe::stats::{self, Method};
use axisprobe::{EmbeddingModel, Error, Fallback};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn fallback(s: &str) -> PyResult<Fallback> {
    s.parse().map_err(to_py)
}

fn method(s: &str) -> PyResult<Method> {
    s.parse().map_err(to_py)
}

/// Serialize through JSON into plain Python dicts and lists.
fn to_object<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

#[pyclass(name = "Model", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyModel {
    inner: EmbeddingModel,
}

#[pymethods]
impl PyModel {
    /// Load a cache, word2vec binary or text vector file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        EmbeddingModel::load_auto(path)
            .map(|inner| PyModel { inner })
            .map_err(to_py)
    }

    /// Build from rows; each row is L2-normalized.
    #[staticmethod]
    fn from_rows(name: &str, words: Vec<String>, rows: Vec<Vec<f32>>) -> PyResult<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != dim) {
            return Err(PyValueError::new_err("rows differ in length"));
        }
        let flat = rows.into_iter().flatten().collect();
        EmbeddingModel::from_rows(name, dim, words, flat)
            .map(|inner| PyModel { inner })
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.vocab_size()
    }

    fn __contains__(&self, word: &str) -> bool {
        self.inner.contains(word)
    }

    fn words(&self) -> Vec<String> {
        self.inner.words().to_vec()
    }

    #[pyo3(signature = (word, fallback = "lowercase"))]
    fn vector(&self, word: &str, fallback: &str) -> PyResult<Option<Vec<f32>>> {
        let fb = self::fallback(fallback)?;
        Ok(self.inner.lookup(word, fb).map(|l| l.vector.into_owned()))
    }

    fn restrict_top_k(&self, k: usize) -> PyResult<Self> {
        self.inner
            .restrict_top_k(k)
            .map(|inner| PyModel { inner })
            .map_err(to_py)
    }

    fn save_cache(&self, path: &str) -> PyResult<()> {
        self.inner.write_cache_file(path).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model('{}', {} x {})",
            self.inner.name(),
            self.inner.vocab_size(),
            self.inner.dim()
        )
    }
}

#[pyclass(name = "AxisSpec", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyAxisSpec {
    inner: CoreAxisSpec,
}

#[pymethods]
impl PyAxisSpec {
    #[new]
    #[pyo3(signature = (name, pole1, pole2, pole1_name = "pole1", pole2_name = "pole2"))]
    fn new(name: &str, pole1: Vec<String>, pole2: Vec<String>, pole1_name: &str, pole2_name: &str) -> Self {
        PyAxisSpec {
            inner: CoreAxisSpec::new(name, PoleSpec::new(pole1_name, pole1), PoleSpec::new(pole2_name, pole2)),
        }
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        CoreAxisSpec::load(path)
            .map(|inner| PyAxisSpec { inner })
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    fn swapped(&self) -> Self {
        PyAxisSpec {
            inner: self.inner.swapped(),
        }
    }

    #[pyo3(signature = (model, fallback = "lowercase"))]
    fn build(&self, model: &PyModel, fallback: &str) -> PyResult<PyAxis> {
        build_axis(&model.inner, &self.inner, self::fallback(fallback)?)
            .map(|inner| PyAxis { inner })
            .map_err(to_py)
    }
}

#[pyclass(name = "Axis", frozen)]
pub struct PyAxis {
    inner: CulturalAxis,
}

#[pymethods]
impl PyAxis {
    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn direction(&self) -> Vec<f64> {
        self.inner.direction.clone()
    }

    /// Smaller of the two poles' resolved shares.
    #[getter]
    fn coverage(&self) -> f64 {
        self.inner.coverage()
    }

    fn project(&self, vector: Vec<f64>) -> PyResult<f64> {
        self.inner.project_f64(&vector).map_err(to_py)
    }

    /// Projection of every resolvable word; unresolved words are omitted.
    #[pyo3(signature = (model, words, fallback = "lowercase"))]
    fn project_words(&self, model: &PyModel, words: Vec<String>, fallback: &str) -> PyResult<Vec<(String, f64)>> {
        let b = axisprobe::axis::project_batch(&self.inner, &words, &model.inner, self::fallback(fallback)?)
            .map_err(to_py)?;
        Ok(b.projected.into_iter().map(|p| (p.word, p.value)).collect())
    }
}

#[pyclass(name = "Lexicon", frozen)]
pub struct PyLexicon {
    inner: SentimentLexicon,
}

#[pymethods]
impl PyLexicon {
    /// Load a lexicon folder holding `format.json` and its data file.
    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        SentimentLexicon::load_dir(dir)
            .map(|inner| PyLexicon { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (name, pairs, graded = false))]
    fn from_pairs(name: &str, pairs: Vec<(String, f64)>, graded: bool) -> PyResult<Self> {
        let kind = if graded {
            LexiconKind::Graded
        } else {
            LexiconKind::Binary
        };
        SentimentLexicon::from_pairs(name, kind, pairs)
            .map(|inner| PyLexicon { inner })
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn score(&self, word: &str) -> Option<f64> {
        self.inner.score(word)
    }

    fn items(&self) -> Vec<(String, f64)> {
        self.inner.entries().map(|e| (e.word.clone(), e.score)).collect()
    }
}

/// `(r, p_raw)` Spearman correlation with average ranks for ties.
#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    stats::spearman(&x, &y).map(|c| (c.coefficient, c.p_raw)).map_err(to_py)
}

#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64)> {
    stats::pearson(&x, &y).map(|c| (c.coefficient, c.p_raw)).map_err(to_py)
}

fn options(method: &str, fallback: &str, family_size: Option<usize>) -> PyResult<ScreenOptions> {
    Ok(ScreenOptions {
        method: self::method(method)?,
        fallback: self::fallback(fallback)?,
        family_size,
        ..Default::default()
    })
}

/// Bias matrix of one lexicon over models x axes, as a dict.
#[pyfunction]
#[pyo3(signature = (models, axes, lexicon, method = "spearman", fallback = "lowercase", family_size = None))]
fn screen(
    py: Python<'_>,
    models: Vec<PyModel>,
    axes: Vec<PyAxisSpec>,
    lexicon: &PyLexicon,
    method: &str,
    fallback: &str,
    family_size: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let models: Vec<EmbeddingModel> = models.into_iter().map(|m| m.inner).collect();
    let axes: Vec<CoreAxisSpec> = axes.into_iter().map(|a| a.inner).collect();
    let opts = options(method, fallback, family_size)?;
    let m = axisprobe::screening::screen(&models, &axes, &lexicon.inner, &opts).map_err(to_py)?;
    to_object(py, &m)
}

#[pyfunction]
#[pyo3(signature = (models, axis, lexicon, fractions = vec![0.25, 0.5, 0.75], repetitions = 500, seed = 0, method = "spearman"))]
#[allow(clippy::too_many_arguments)]
fn excise(
    py: Python<'_>,
    models: Vec<PyModel>,
    axis: &PyAxisSpec,
    lexicon: &PyLexicon,
    fractions: Vec<f64>,
    repetitions: usize,
    seed: u64,
    method: &str,
) -> PyResult<Py<PyAny>> {
    let models: Vec<EmbeddingModel> = models.into_iter().map(|m| m.inner).collect();
    let cfg = ExcisionConfig {
        fractions,
        repetitions,
        seed,
    };
    let opts = options(method, "lowercase", None)?;
    let r = excision_experiment(&models, &axis.inner, &lexicon.inner, &cfg, &opts).map_err(to_py)?;
    to_object(py, &r)
}

/// Antonym pairs ranked by |cosine| of their pair axis with `axis`.
#[pyfunction]
#[pyo3(signature = (model, axis, pairs, top_k = None, fallback = "lowercase"))]
fn align(
    model: &PyModel,
    axis: &PyAxis,
    pairs: Vec<(String, String)>,
    top_k: Option<usize>,
    fallback: &str,
) -> PyResult<Vec<(String, String, f64)>> {
    let pairs: Vec<AntonymPair> = pairs.into_iter().map(|(a, b)| AntonymPair::new(a, b)).collect();
    let r = alignment_ranking(&model.inner, &axis.inner, &pairs, top_k, self::fallback(fallback)?).map_err(to_py)?;
    Ok(r.entries
        .into_iter()
        .map(|e| (e.pair.word1, e.pair.word2, e.cosine))
        .collect())
}

#[pymodule]
fn axisprobe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyAxisSpec>()?;
    m.add_class::<PyAxis>()?;
    m.add_class::<PyLexicon>()?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(screen, m)?)?;
    m.add_function(wrap_pyfunction!(excise, m)?)?;
    m.add_function(wrap_pyfunction!(align, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
