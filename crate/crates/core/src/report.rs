//! Batch runs: configuration, the JSON report and the files written next to it.
//!
//! Reports carry no wall-clock data so that identical configurations give
//! byte-identical output; timings are written to a separate `timing.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::detour::{detour_profile, detour_verdict, DetourProfile, DetourVerdict};
use crate::error::{Error, Result};
use crate::euclid::{eta0, euclid_sup_search};
use crate::plot::{default_reference_lines, plot_profile};
use crate::rips::{classify, omega_profile, OmegaOptions, ScaleProfile, Thresholds, Verdict};
use crate::sampler::SamplerSpec;
use crate::space::{
    all_pairs_distances, load_graph, subdivide, DistanceMatrix, Generator, MetricGraph,
};
use crate::tower::{
    build_tower, default_scales, graph_hash, rescaled_four_point, tower_ratio_check,
    ConeDefectCurve, ConeOptions, TowerMeta, TowerRatio, TowerSpace,
};
use crate::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Analyze,
    Detour,
    Euclid,
    Tower,
    Cone,
}

impl Subcommand {
    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::Analyze => "analyze",
            Subcommand::Detour => "detour",
            Subcommand::Euclid => "euclid",
            Subcommand::Tower => "tower",
            Subcommand::Cone => "cone",
        }
    }

    fn needs_graph(self) -> bool {
        self != Subcommand::Euclid
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum GraphSource {
    File { path: PathBuf },
    Generator { spec: Generator },
}

/// Everything a run depends on. Echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub source: Option<GraphSource>,
    pub seed: u64,
    /// Random budget; `None` enumerates every tuple.
    pub samples: Option<usize>,
    /// Subdivide every edge to at most this length before analysis.
    pub resolution: Option<f64>,
    pub t_min: Option<f64>,
    /// Detour scales; empty selects a default grid from the diameter.
    pub t_grid: Vec<f64>,
    pub thresholds: Thresholds,
    /// Where files go; not part of the echo, so reports compare across runs.
    #[serde(skip, default)]
    pub out_dir: PathBuf,
    pub buckets: usize,
    pub geodesic_choices: usize,
    pub levels: usize,
    pub basepoint: usize,
    pub spine_step: f64,
    pub tower_tolerance: f64,
    /// Cone scales; empty selects [`default_scales`] with six entries.
    pub scales: Vec<f64>,
    pub window: f64,
    pub grid_resolution: usize,
    pub tol: f64,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            subcommand,
            source: None,
            seed: 0,
            samples: Some(20_000),
            resolution: None,
            t_min: None,
            t_grid: Vec::new(),
            thresholds: Thresholds::default(),
            out_dir: out_dir.into(),
            buckets: 64,
            geodesic_choices: 1,
            levels: 4,
            basepoint: 0,
            spine_step: 0.25,
            tower_tolerance: 0.01,
            scales: Vec::new(),
            window: 2.0,
            grid_resolution: 200,
            tol: 1e-10,
        }
    }

    pub fn sampler(&self) -> SamplerSpec {
        match self.samples {
            Some(n) => SamplerSpec::random(n, self.seed),
            None => SamplerSpec::Exhaustive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.sampler().check()?;
        if self.subcommand.needs_graph() && self.source.is_none() {
            return Err(Error::BadParams(format!(
                "`{}` needs --input or --gen",
                self.subcommand.as_str()
            )));
        }
        if let Some(h) = self.resolution {
            if !(h > 0.0) {
                return Err(Error::NonPositiveResolution(h));
            }
        }
        if !(self.tower_tolerance >= 0.0) {
            return Err(Error::BadParams(
                "tower tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphInfo {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub resolution: f64,
    pub diameter: f64,
    /// SHA-256 of the canonical graph file.
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub sampler: Option<SamplerSpec>,
    /// Tuples actually evaluated by the main computation.
    pub evaluated: usize,
    pub graph: Option<GraphInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclidResult {
    pub eta0: f64,
    pub alpha0: f64,
    pub sup_found: f64,
    pub argmax_angles: [f64; 2],
    pub grid_resolution: usize,
    pub tol: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerResult {
    pub meta: TowerMeta,
    pub vertex_count: usize,
    pub ratio: TowerRatio,
    pub tolerance: f64,
    /// `sup_tower <= sup_base + tolerance`.
    pub contract_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Analyze {
        profile: ScaleProfile,
        verdict: Verdict,
    },
    Detour {
        profile: DetourProfile,
        verdict: DetourVerdict,
    },
    Euclid(EuclidResult),
    Tower(TowerResult),
    Cone {
        curve: ConeDefectCurve,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub provenance: Provenance,
    pub result: Outcome,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Timing kept apart from the report.
#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub subcommand: Subcommand,
    pub seconds: f64,
}

fn load_source(source: &GraphSource, seed: u64) -> Result<MetricGraph> {
    match source {
        GraphSource::File { path } => load_graph(path),
        GraphSource::Generator { spec } => spec.generate(seed),
    }
}

fn graph_info(g: &MetricGraph, d: &DistanceMatrix) -> GraphInfo {
    GraphInfo {
        vertex_count: g.vertex_count(),
        edge_count: g.edges().len(),
        resolution: g.resolution(),
        diameter: d.diameter(),
        hash: graph_hash(g),
    }
}

/// Four evenly spaced detour scales from `diameter / 20` to `diameter / 5`,
/// so that pairs at distance `2.5 t` exist at every scale.
pub fn default_t_grid(diameter: f64) -> Vec<f64> {
    (0..4)
        .map(|k| diameter / 20.0 + k as f64 * (diameter / 5.0 - diameter / 20.0) / 3.0)
        .collect()
}

fn write(path: PathBuf, contents: &str) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Runs `config` and writes `report.json` plus subcommand-specific files to
/// the output directory.
pub fn run(config: &RunConfig) -> Result<Report> {
    let started = Instant::now();
    config.validate()?;
    let out = &config.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let (report, tower) = compute_inner(config)?;
    write(out.join("report.json"), &report.to_json())?;
    match &report.result {
        Outcome::Analyze { profile, .. } => {
            write(out.join("samples.csv"), &profile.samples_csv())?;
            write(out.join("buckets.csv"), &profile.buckets_csv())?;
            let svg = plot_profile(
                profile,
                &default_reference_lines(config.thresholds.hyperbolic),
            )?;
            write(out.join("profile.svg"), &svg)?;
        }
        Outcome::Detour { profile, .. } => write(out.join("detour.csv"), &profile.csv())?,
        Outcome::Cone { curve } => write(out.join("cone.csv"), &curve.csv())?,
        Outcome::Euclid(_) | Outcome::Tower(_) => {}
    }
    if let Some(tower) = tower {
        tower.save(out.join("tower.graph"))?;
    }
    let timing = Timing {
        subcommand: config.subcommand,
        seconds: started.elapsed().as_secs_f64(),
    };
    write(
        out.join("timing.json"),
        &serde_json::to_string_pretty(&timing).expect("timing serializes"),
    )?;
    Ok(report)
}

fn prepared_graph(config: &RunConfig, source: &GraphSource) -> Result<MetricGraph> {
    let g = load_source(source, config.seed)?;
    match config.resolution {
        Some(h) => subdivide(&g, h),
        None => Ok(g),
    }
}

/// The report without touching the filesystem.
pub fn compute(config: &RunConfig) -> Result<Report> {
    compute_inner(config).map(|(r, _)| r)
}

fn compute_inner(config: &RunConfig) -> Result<(Report, Option<TowerSpace>)> {
    config.validate()?;
    let sampler = config.sampler();
    let provenance = |evaluated, graph| Provenance {
        tool: "hyperthin".into(),
        version: VERSION.into(),
        seed: config.seed,
        sampler: Some(sampler),
        evaluated,
        graph,
    };

    if config.subcommand == Subcommand::Euclid {
        let e = eta0();
        let s = euclid_sup_search(config.grid_resolution, config.tol)?;
        let report = Report {
            config: config.clone(),
            provenance: Provenance {
                sampler: None,
                ..provenance(s.evaluations, None)
            },
            result: Outcome::Euclid(EuclidResult {
                eta0: e.value,
                alpha0: e.alpha0,
                sup_found: s.sup_ratio,
                argmax_angles: s.argmax_angles,
                grid_resolution: s.grid_resolution,
                tol: s.tol,
                evaluations: s.evaluations,
            }),
        };
        return Ok((report, None));
    }

    let source = config.source.as_ref().expect("validated");
    let g = prepared_graph(config, source)?;
    let d = all_pairs_distances(&g);
    let info = graph_info(&g, &d);

    let mut built = None;
    let (evaluated, result) = match config.subcommand {
        Subcommand::Analyze => {
            let opts = OmegaOptions {
                sampler,
                buckets: config.buckets,
                geodesic_choices: config.geodesic_choices,
                t_min: config.t_min,
            };
            let profile = omega_profile(&g, &d, &opts)?;
            let verdict = classify(&profile, &config.thresholds)?;
            (profile.samples.len(), Outcome::Analyze { profile, verdict })
        }
        Subcommand::Detour => {
            let ts = if config.t_grid.is_empty() {
                default_t_grid(d.diameter())
            } else {
                config.t_grid.clone()
            };
            let profile = detour_profile(&g, &d, &ts, &sampler)?;
            let verdict = detour_verdict(&profile, &config.thresholds)?;
            let n = profile.entries.iter().map(|e| e.admissible).sum();
            (n, Outcome::Detour { profile, verdict })
        }
        Subcommand::Tower => {
            let tower = build_tower(&g, config.basepoint, config.levels, config.spine_step)?;
            let ratio = tower_ratio_check(&tower, &sampler)?;
            let result = TowerResult {
                meta: tower.meta(),
                vertex_count: tower.graph.vertex_count(),
                ratio,
                tolerance: config.tower_tolerance,
                contract_holds: ratio.sup_tower <= ratio.sup_base + config.tower_tolerance,
            };
            built = Some(tower);
            (
                ratio.tower_samples + ratio.base_samples,
                Outcome::Tower(result),
            )
        }
        Subcommand::Cone => {
            let scales = if config.scales.is_empty() {
                default_scales(&d, g.max_edge_length(), 6)?
            } else {
                config.scales.clone()
            };
            let opts = ConeOptions {
                sampler,
                window: config.window,
            };
            let curve = rescaled_four_point(&d, &scales, &opts)?;
            (curve.accepted.iter().sum(), Outcome::Cone { curve })
        }
        Subcommand::Euclid => unreachable!("handled above"),
    };

    let report = Report {
        config: config.clone(),
        provenance: provenance(evaluated, Some(info)),
        result,
    };
    Ok((report, built))
}

/// Re-derives the band of an analyze or detour report from its embedded
/// profile and thresholds.
pub fn recheck(report: &Report) -> Result<Option<crate::rips::Band>> {
    let th = &report.config.thresholds;
    Ok(match &report.result {
        Outcome::Analyze { profile, .. } => Some(classify(profile, th)?.band),
        Outcome::Detour { profile, .. } => Some(detour_verdict(profile, th)?.band),
        _ => None,
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Report> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}
