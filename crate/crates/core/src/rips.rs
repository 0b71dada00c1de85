//! Rips constants of geodesic triangles, their scale profile and the
//! threshold classification built on top of it.
//!
//! All quantities here are empirical: `omega_hat` is a lower bound of the
//! true profile (a max over sampled triangles and, by default, a single
//! geodesic per side), and the verdict bands only say whether the finite
//! sample is *consistent* with an asymptotic statement.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::ETA0;
use crate::sampler::SamplerSpec;
use crate::space::{geodesics, shortest_path, DistanceMatrix, Geodesic, MetricGraph, EPS};

/// Three vertices and the canonical geodesics `[a,b]`, `[b,c]`, `[c,a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub sides: [Geodesic; 3],
    pub perimeter: f64,
}

pub fn make_triangle(
    g: &MetricGraph,
    d: &DistanceMatrix,
    a: usize,
    b: usize,
    c: usize,
) -> Triangle {
    let sides = [
        shortest_path(g, d, a, b),
        shortest_path(g, d, b, c),
        shortest_path(g, d, c, a),
    ];
    let perimeter = d.get(a, b) + d.get(b, c) + d.get(c, a);
    Triangle {
        vertices: [a, b, c],
        sides,
        perimeter,
    }
}

/// Smallest δ such that each side lies in the closed δ-neighbourhood of the
/// union of the other two, measured over vertices.
pub fn rips_delta(d: &DistanceMatrix, tri: &Triangle) -> f64 {
    sides_delta(d, [&tri.sides[0], &tri.sides[1], &tri.sides[2]])
}

fn sides_delta(d: &DistanceMatrix, sides: [&Geodesic; 3]) -> f64 {
    let mut delta: f64 = 0.0;
    for i in 0..3 {
        let others = [sides[(i + 1) % 3], sides[(i + 2) % 3]];
        for &p in &sides[i].vertices {
            let row = d.row(p);
            let mut nearest = f64::INFINITY;
            'scan: for side in others {
                for &q in &side.vertices {
                    let x = row[q];
                    if x < nearest {
                        nearest = x;
                        // p already at or below the running max: cannot raise it
                        if nearest <= delta {
                            break 'scan;
                        }
                    }
                }
            }
            delta = delta.max(nearest);
        }
    }
    delta
}

/// Like [`rips_delta`] but maximizes over up to `k` geodesics per side.
/// `k = 1` is the canonical triangle.
pub fn rips_delta_over_geodesics(
    g: &MetricGraph,
    d: &DistanceMatrix,
    a: usize,
    b: usize,
    c: usize,
    k: usize,
) -> f64 {
    let k = k.max(1);
    let ab = geodesics(g, d, a, b, k);
    let bc = geodesics(g, d, b, c, k);
    let ca = geodesics(g, d, c, a, k);
    let mut best: f64 = 0.0;
    for s0 in &ab {
        for s1 in &bc {
            for s2 in &ca {
                best = best.max(sides_delta(d, [s0, s1, s2]));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleSample {
    pub id: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub perimeter: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub t: f64,
    pub omega_hat: f64,
}

/// Sampled `(perimeter, δ)` pairs and the cumulative maximum `omega_hat(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleProfile {
    pub samples: Vec<TriangleSample>,
    pub buckets: Vec<Bucket>,
    /// Start of the tail used by [`classify`].
    pub t_min: f64,
    /// Subdivision resolution of the analysed graph (0 when unsubdivided).
    pub resolution: f64,
    pub diameter: f64,
    pub sampler: SamplerSpec,
    pub geodesic_choices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaOptions {
    pub sampler: SamplerSpec,
    pub buckets: usize,
    /// Geodesics tried per side; 1 uses only the canonical one.
    pub geodesic_choices: usize,
    /// Tail start; `None` means half the largest sampled perimeter.
    pub t_min: Option<f64>,
}

impl OmegaOptions {
    pub fn new(sampler: SamplerSpec) -> Self {
        OmegaOptions {
            sampler,
            buckets: 64,
            geodesic_choices: 1,
            t_min: None,
        }
    }
}

pub fn omega_profile(
    g: &MetricGraph,
    d: &DistanceMatrix,
    opts: &OmegaOptions,
) -> Result<ScaleProfile> {
    let triples = opts.sampler.triples(g.vertex_count())?;
    let samples: Vec<TriangleSample> = triples
        .par_iter()
        .enumerate()
        .map(|(id, &[a, b, c])| {
            let delta = if opts.geodesic_choices <= 1 {
                rips_delta(d, &make_triangle(g, d, a, b, c))
            } else {
                rips_delta_over_geodesics(g, d, a, b, c, opts.geodesic_choices)
            };
            TriangleSample {
                id,
                a,
                b,
                c,
                perimeter: d.get(a, b) + d.get(b, c) + d.get(c, a),
                delta,
            }
        })
        .collect();
    let max_pr = samples.iter().map(|s| s.perimeter).fold(0.0, f64::max);
    Ok(ScaleProfile::from_samples(
        samples,
        opts.buckets,
        opts.t_min.unwrap_or(max_pr / 2.0),
        g.resolution(),
        d.diameter(),
        opts.sampler,
        opts.geodesic_choices.max(1),
    ))
}

impl ScaleProfile {
    /// Rebuilds buckets from raw samples: `t_k = k · max_perimeter / count`.
    pub fn from_samples(
        samples: Vec<TriangleSample>,
        bucket_count: usize,
        t_min: f64,
        resolution: f64,
        diameter: f64,
        sampler: SamplerSpec,
        geodesic_choices: usize,
    ) -> Self {
        let max_pr = samples.iter().map(|s| s.perimeter).fold(0.0, f64::max);
        let mut buckets = Vec::new();
        if max_pr > 0.0 && bucket_count > 0 {
            let mut sorted: Vec<(f64, f64)> =
                samples.iter().map(|s| (s.perimeter, s.delta)).collect();
            sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut idx = 0;
            let mut running: f64 = 0.0;
            for k in 1..=bucket_count {
                let t = if k == bucket_count {
                    max_pr
                } else {
                    max_pr * k as f64 / bucket_count as f64
                };
                while idx < sorted.len() && sorted[idx].0 <= t + EPS {
                    running = running.max(sorted[idx].1);
                    idx += 1;
                }
                buckets.push(Bucket {
                    t,
                    omega_hat: running,
                });
            }
        }
        ScaleProfile {
            samples,
            buckets,
            t_min,
            resolution,
            diameter,
            sampler,
            geodesic_choices,
        }
    }

    /// Max δ over samples with perimeter at most `t`.
    pub fn omega_at(&self, t: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.perimeter <= t + EPS)
            .map(|s| s.delta)
            .fold(0.0, f64::max)
    }

    pub fn samples_csv(&self) -> String {
        let mut out = String::from("triangle_id,a,b,c,perimeter,delta\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.id, s.a, s.b, s.c, s.perimeter, s.delta
            );
        }
        out
    }

    pub fn buckets_csv(&self) -> String {
        let mut out = String::from("t,omega_hat,omega_hat_over_t\n");
        for b in &self.buckets {
            let _ = writeln!(out, "{},{},{}", b.t, b.omega_hat, b.omega_hat / b.t);
        }
        out
    }
}

/// Max δ/pr over samples, ignoring those below ten times the resolution.
pub fn thinness_ratio_sup(profile: &ScaleProfile) -> Result<f64> {
    let cutoff = 10.0 * profile.resolution;
    profile
        .samples
        .iter()
        .filter(|s| s.perimeter > 0.0 && s.perimeter >= cutoff)
        .map(|s| s.delta / s.perimeter)
        .reduce(f64::max)
        .ok_or(Error::EmptyProfile)
}

/// Tail slope: least-squares slope of `omega_hat(t)` against `t` over the
/// buckets with `t >= t_min`, or `None` with fewer than two such buckets.
///
/// On a finite graph `omega_hat(t) / t` never reaches zero, so the ratio
/// itself cannot tell a bounded Ω from a linear one; the slope of the tail can.
pub fn tail_slope(profile: &ScaleProfile, t_min: f64) -> Option<f64> {
    let tail: Vec<&Bucket> = profile
        .buckets
        .iter()
        .filter(|b| b.t >= t_min - EPS)
        .collect();
    if tail.len() < 2 {
        return None;
    }
    let n = tail.len() as f64;
    let mt = tail.iter().map(|b| b.t).sum::<f64>() / n;
    let mo = tail.iter().map(|b| b.omega_hat).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|b| (b.t - mt).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|b| (b.t - mt) * (b.omega_hat - mo)).sum();
    if sxx <= 0.0 {
        return None;
    }
    Some((sxy / sxx).max(0.0))
}

/// Classification thresholds. Defaults are the published constants; every
/// call site takes them from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Bound on the asymptotic slope of Ω below which the space is hyperbolic.
    pub hyperbolic: f64,
    /// Bound on sup δ/pr below which the space is a real tree.
    pub tree: f64,
    /// Bound on liminf G(t)/t above which the space is hyperbolic.
    pub detour: f64,
    /// Minimum number of tail samples (perimeter >= t_min) needed to decide.
    pub min_tail_samples: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            hyperbolic: 1.0 / 32.0,
            tree: 1.0 / 32.0,
            detour: 30.0,
            min_tail_samples: 10,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("hyperbolic", self.hyperbolic),
            ("tree", self.tree),
            ("detour", self.detour),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::BadParams(format!(
                    "threshold `{name}` must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Known bracket for the optimal hyperbolicity and tree constants. The
/// published corollary states the bracket for the hyperbolicity constant
/// twice; the second occurrence is read as the tree constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantBrackets {
    pub hyperbolic: [f64; 2],
    pub tree: [f64; 2],
    pub note: String,
}

impl Default for ConstantBrackets {
    fn default() -> Self {
        ConstantBrackets {
            hyperbolic: [1.0 / 32.0, ETA0],
            tree: [1.0 / 32.0, ETA0],
            note: "source states the hyperbolicity bracket twice; second copy read as the tree bracket"
                .into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    TreeConsistent,
    HyperbolicConsistent,
    NotHyperbolicConsistent,
    Inconclusive,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::TreeConsistent => "tree-consistent",
            Band::HyperbolicConsistent => "hyperbolic-consistent",
            Band::NotHyperbolicConsistent => "not-hyperbolic-consistent",
            Band::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub ratio_sup: f64,
    /// `None` when the tail holds fewer than two buckets.
    pub slope_tail: Option<f64>,
    pub t_min: f64,
    pub tail_samples: usize,
    pub band: Band,
    pub thresholds: Thresholds,
    pub brackets: ConstantBrackets,
}

/// The band as a pure function of its inputs.
pub fn band_for(
    ratio_sup: f64,
    slope_tail: Option<f64>,
    tail_samples: usize,
    th: &Thresholds,
) -> Band {
    if ratio_sup < th.tree {
        return Band::TreeConsistent;
    }
    match slope_tail {
        Some(_) if tail_samples < th.min_tail_samples => Band::Inconclusive,
        None => Band::Inconclusive,
        Some(s) if s < th.hyperbolic => Band::HyperbolicConsistent,
        Some(_) => Band::NotHyperbolicConsistent,
    }
}

pub fn classify(profile: &ScaleProfile, th: &Thresholds) -> Result<Verdict> {
    let ratio_sup = thinness_ratio_sup(profile)?;
    let t_min = profile.t_min;
    let tail_samples = profile
        .samples
        .iter()
        .filter(|s| s.perimeter >= t_min - EPS)
        .count();
    let slope = tail_slope(profile, t_min);
    Ok(Verdict {
        ratio_sup,
        slope_tail: slope,
        t_min,
        tail_samples,
        band: band_for(ratio_sup, slope, tail_samples, th),
        thresholds: *th,
        brackets: ConstantBrackets::default(),
    })
}

/// Half the gap between the largest and second-largest pairing sum.
#[inline]
pub fn four_point_defect(d: &DistanceMatrix, [w, x, y, z]: [usize; 4]) -> f64 {
    let mut s = [
        d.get(w, x) + d.get(y, z),
        d.get(w, y) + d.get(x, z),
        d.get(w, z) + d.get(x, y),
    ];
    s.sort_by(f64::total_cmp);
    (s[2] - s[1]) / 2.0
}

/// Max four-point defect over sampled quadruples.
pub fn four_point_delta(d: &DistanceMatrix, sampler: &SamplerSpec) -> Result<f64> {
    four_point_delta_filtered(d, sampler, |_| true).map(|o| o.unwrap_or(0.0))
}

/// Max defect over the sampled quadruples accepted by `keep`; `None` when no
/// quadruple passes.
pub fn four_point_delta_filtered(
    d: &DistanceMatrix,
    sampler: &SamplerSpec,
    keep: impl Fn([usize; 4]) -> bool + Sync,
) -> Result<Option<f64>> {
    if d.len() < 4 {
        return Err(Error::TooFewVertices(d.len()));
    }
    let quads = sampler.quadruples(d.len())?;
    Ok(quads
        .par_iter()
        .filter(|&&q| keep(q))
        .map(|&q| four_point_defect(d, q))
        .reduce_with(f64::max))
}
