//! Python bindings. Structured results come back as plain dicts and lists,
//! produced by the same serializers that write the JSON reports.

use std::path::PathBuf;

use hyperthin::detour::{detour_length, detour_profile, detour_verdict};
use hyperthin::euclid::{self, euclid_sup_search};
use hyperthin::report::{self, GraphSource, RunConfig, Subcommand};
use hyperthin::rips::{classify, make_triangle, omega_profile, rips_delta, OmegaOptions};
use hyperthin::space::{self, all_pairs_distances, shortest_path, Generator};
use hyperthin::tower::{
    build_tower, default_scales, rescaled_four_point, tower_ratio_check, ConeOptions,
};
use hyperthin::{DistanceMatrix, Error, MetricGraph, SamplerSpec, Thresholds};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn sampler(samples: Option<usize>, seed: u64) -> SamplerSpec {
    match samples {
        Some(n) => SamplerSpec::random(n, seed),
        None => SamplerSpec::Exhaustive,
    }
}

/// A metric graph together with its all-pairs distance matrix.
#[pyclass(module = "hyperthin", frozen)]
pub struct Graph {
    graph: MetricGraph,
    dist: DistanceMatrix,
}

impl Graph {
    fn wrap(graph: MetricGraph) -> Self {
        let dist = all_pairs_distances(&graph);
        Graph { graph, dist }
    }

    fn vertex(&self, v: usize) -> PyResult<usize> {
        self.graph.check_vertex(v).map_err(py_err)?;
        Ok(v)
    }
}

#[pymethods]
impl Graph {
    /// Builds a graph from `(u, v, length)` triples.
    #[new]
    fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        space::build_graph(vertex_count, edges)
            .map(Graph::wrap)
            .map_err(py_err)
    }

    /// Generator spec such as `"grid_plane:40"` or `"hyperbolic_tessellation:6"`.
    #[staticmethod]
    #[pyo3(signature = (spec, seed = 0))]
    fn generate(spec: &str, seed: u64) -> PyResult<Self> {
        let g: Generator = spec.parse().map_err(py_err)?;
        g.generate(seed).map(Graph::wrap).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        space::load_graph(path).map(Graph::wrap).map_err(py_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        space::parse_graph(text).map(Graph::wrap).map_err(py_err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        space::save_graph(&self.graph, path).map_err(py_err)
    }

    fn to_text(&self) -> String {
        space::write_graph(&self.graph)
    }

    fn subdivide(&self, h: f64) -> PyResult<Self> {
        space::subdivide(&self.graph, h)
            .map(Graph::wrap)
            .map_err(py_err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.graph
            .edges()
            .iter()
            .map(|e| (e.u, e.v, e.length))
            .collect()
    }

    #[getter]
    fn resolution(&self) -> f64 {
        self.graph.resolution()
    }

    #[getter]
    fn diameter(&self) -> f64 {
        self.dist.diameter()
    }

    fn is_tree(&self) -> bool {
        self.graph.is_tree()
    }

    fn distance(&self, u: usize, v: usize) -> PyResult<f64> {
        Ok(self.dist.get(self.vertex(u)?, self.vertex(v)?))
    }

    /// Canonical geodesic from `u` to `v` as a vertex list.
    fn shortest_path(&self, u: usize, v: usize) -> PyResult<Vec<usize>> {
        let (u, v) = (self.vertex(u)?, self.vertex(v)?);
        Ok(shortest_path(&self.graph, &self.dist, u, v).vertices)
    }

    /// Rips constant of the triangle with canonical geodesic sides.
    fn rips_delta(&self, a: usize, b: usize, c: usize) -> PyResult<f64> {
        let (a, b, c) = (self.vertex(a)?, self.vertex(b)?, self.vertex(c)?);
        Ok(rips_delta(
            &self.dist,
            &make_triangle(&self.graph, &self.dist, a, b, c),
        ))
    }

    /// Scale profile and verdict. `samples=None` enumerates every triple.
    #[pyo3(signature = (samples = Some(20_000), seed = 0, t_min = None, buckets = 64, geodesics = 1))]
    fn analyze<'py>(
        &self,
        py: Python<'py>,
        samples: Option<usize>,
        seed: u64,
        t_min: Option<f64>,
        buckets: usize,
        geodesics: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let opts = OmegaOptions {
            sampler: sampler(samples, seed),
            buckets,
            geodesic_choices: geodesics,
            t_min,
        };
        let profile = omega_profile(&self.graph, &self.dist, &opts).map_err(py_err)?;
        let verdict = classify(&profile, &Thresholds::default()).map_err(py_err)?;
        to_py(
            py,
            &serde_json::json!({ "verdict": verdict, "buckets": profile.buckets }),
        )
    }

    fn detour_length(&self, x: usize, y: usize, z: usize, t: f64) -> PyResult<f64> {
        detour_length(&self.graph, &self.dist, x, y, z, t).map_err(py_err)
    }

    #[pyo3(signature = (ts, samples = Some(2000), seed = 0))]
    fn detour_profile<'py>(
        &self,
        py: Python<'py>,
        ts: Vec<f64>,
        samples: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = detour_profile(&self.graph, &self.dist, &ts, &sampler(samples, seed))
            .map_err(py_err)?;
        let v = detour_verdict(&p, &Thresholds::default()).map_err(py_err)?;
        to_py(py, &serde_json::json!({ "profile": p, "verdict": v }))
    }

    #[pyo3(signature = (basepoint = 0, levels = 4, spine_step = 0.25, samples = Some(5000), seed = 0))]
    fn tower_check<'py>(
        &self,
        py: Python<'py>,
        basepoint: usize,
        levels: usize,
        spine_step: f64,
        samples: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let tower = build_tower(&self.graph, basepoint, levels, spine_step).map_err(py_err)?;
        let ratio = tower_ratio_check(&tower, &sampler(samples, seed)).map_err(py_err)?;
        to_py(
            py,
            &serde_json::json!({ "meta": tower.meta(), "ratio": ratio }),
        )
    }

    #[pyo3(signature = (scales = None, window = 2.0, samples = Some(5000), seed = 0))]
    fn cone_curve<'py>(
        &self,
        py: Python<'py>,
        scales: Option<Vec<f64>>,
        window: f64,
        samples: Option<usize>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let scales = match scales {
            Some(s) => s,
            None => default_scales(&self.dist, self.graph.max_edge_length(), 6).map_err(py_err)?,
        };
        let opts = ConeOptions {
            sampler: sampler(samples, seed),
            window,
        };
        let curve = rescaled_four_point(&self.dist, &scales, &opts).map_err(py_err)?;
        to_py(py, &curve)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={}, diameter={})",
            self.graph.vertex_count(),
            self.graph.edges().len(),
            self.dist.diameter()
        )
    }
}

/// `(value, alpha0)` of the Euclidean thinness constant.
#[pyfunction]
fn eta0() -> (f64, f64) {
    let e = euclid::eta0();
    (e.value, e.alpha0)
}

#[pyfunction]
fn isoceles_ratio(alpha: f64) -> PyResult<f64> {
    euclid::isoceles_ratio(alpha).map_err(py_err)
}

#[pyfunction]
fn euclid_triangle_delta(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    euclid::euclid_triangle_delta(&euclid::EuclidTriangle::new(a, b, c), 1e-9)
}

#[pyfunction]
#[pyo3(signature = (grid_resolution = 200, tol = 1e-10))]
fn euclid_sup<'py>(
    py: Python<'py>,
    grid_resolution: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = euclid_sup_search(grid_resolution, tol).map_err(py_err)?;
    to_py(py, &s)
}

/// Runs a subcommand on a generator spec and writes the usual files to `out`.
/// Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (subcommand, out, spec = None, samples = Some(20_000), seed = 0))]
fn run<'py>(
    py: Python<'py>,
    subcommand: &str,
    out: PathBuf,
    spec: Option<&str>,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let sub = match subcommand {
        "analyze" => Subcommand::Analyze,
        "detour" => Subcommand::Detour,
        "euclid" => Subcommand::Euclid,
        "tower" => Subcommand::Tower,
        "cone" => Subcommand::Cone,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown subcommand `{other}`"
            )))
        }
    };
    let mut cfg = RunConfig::new(sub, out);
    cfg.source = spec
        .map(|s| {
            s.parse::<Generator>()
                .map(|spec| GraphSource::Generator { spec })
        })
        .transpose()
        .map_err(py_err)?;
    cfg.samples = samples;
    cfg.seed = seed;
    let r = report::run(&cfg).map_err(py_err)?;
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "hyperthin")]
fn hyperthin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(eta0, m)?)?;
    m.add_function(wrap_pyfunction!(isoceles_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(euclid_triangle_delta, m)?)?;
    m.add_function(wrap_pyfunction!(euclid_sup, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("ETA0", euclid::ETA0)?;
    m.add("__version__", hyperthin::VERSION)?;
    Ok(())
}
