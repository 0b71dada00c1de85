//! Detour growth.
//!
//! A `t`-detour joins the endpoints `x`, `y` of a geodesic while staying at
//! distance at least `t` from some point `z` of that geodesic. On a graph the
//! shortest such detour is a shortest `x`–`y` path after deleting the open
//! ball `{v : d(z, v) < t}`; the estimate `g_hat(t)` is the minimum over
//! sampled witnesses and therefore an upper bound of the true infimum.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rips::{Band, Thresholds};
use crate::sampler::SamplerSpec;
use crate::space::{approx_eq, shortest_path, single_source, DistanceMatrix, MetricGraph};

/// Endpoints must be at least this many multiples of `t` apart.
pub const WITNESS_SEPARATION: f64 = 2.5;

/// Length of the shortest `x`–`y` path avoiding the open `t`-ball around `z`;
/// `f64::INFINITY` when the ball separates `x` from `y`.
pub fn detour_length(
    g: &MetricGraph,
    d: &DistanceMatrix,
    x: usize,
    y: usize,
    z: usize,
    t: f64,
) -> Result<f64> {
    for v in [x, y, z] {
        g.check_vertex(v)?;
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::BadParams(format!(
            "detour radius must be positive, got {t}"
        )));
    }
    if !shortest_path(g, d, x, y).contains(z) {
        return Err(Error::ZNotOnGeodesic { x, y, z });
    }
    detour_unchecked(g, d, x, y, z, t)
}

fn in_open_ball(d: &DistanceMatrix, z: usize, v: usize, t: f64) -> bool {
    let r = d.get(z, v);
    r < t && !approx_eq(r, t)
}

fn detour_unchecked(
    g: &MetricGraph,
    d: &DistanceMatrix,
    x: usize,
    y: usize,
    z: usize,
    t: f64,
) -> Result<f64> {
    if in_open_ball(d, z, x, t) || in_open_ball(d, z, y, t) {
        return Err(Error::EndpointInsideBall { z, t });
    }
    let dist = single_source(g, x, |v| in_open_ball(d, z, v, t));
    Ok(dist[y])
}

/// Vertex of the canonical geodesic `[x, y]` closest to its midpoint
/// (first one on ties, walking from `x`).
pub fn middle_vertex(g: &MetricGraph, d: &DistanceMatrix, x: usize, y: usize) -> usize {
    let half = d.get(x, y) / 2.0;
    let path = shortest_path(g, d, x, y);
    let mut best = path.vertices[0];
    let mut gap = f64::INFINITY;
    for &v in &path.vertices {
        let e = (d.get(x, v) - half).abs();
        if e < gap - 1e-12 {
            gap = e;
            best = v;
        }
    }
    best
}

mod inf_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str("inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected number or `inf`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetourEntry {
    pub t: f64,
    #[serde(with = "inf_as_string")]
    pub g_hat: f64,
    /// `(x, y, z)` realizing `g_hat` (the first admissible triple when every
    /// detour is infinite).
    pub witness: [usize; 3],
    /// Admissible triples examined at this scale.
    pub admissible: usize,
}

impl DetourEntry {
    pub fn ratio(&self) -> f64 {
        self.g_hat / self.t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetourProfile {
    pub entries: Vec<DetourEntry>,
    pub sampler: SamplerSpec,
    pub separation: f64,
}

fn fmt_inf(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "inf".to_string()
    }
}

impl DetourProfile {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,g_hat,ratio,witness_x,witness_y,witness_z\n");
        for e in &self.entries {
            let [x, y, z] = e.witness;
            let _ = writeln!(
                out,
                "{},{},{},{x},{y},{z}",
                e.t,
                fmt_inf(e.g_hat),
                fmt_inf(e.ratio())
            );
        }
        out
    }
}

/// Candidate endpoint pairs. Random mode draws the same pair stream for every
/// `t`, so admissible sets shrink as `t` grows and `g_hat` is monotone.
fn candidate_pairs(n: usize, sampler: &SamplerSpec) -> Result<Vec<(usize, usize)>> {
    sampler.check()?;
    Ok(match *sampler {
        SamplerSpec::Exhaustive => (0..n)
            .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
            .collect(),
        SamplerSpec::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect()
        }
    })
}

pub fn detour_profile(
    g: &MetricGraph,
    d: &DistanceMatrix,
    ts: &[f64],
    sampler: &SamplerSpec,
) -> Result<DetourProfile> {
    if ts.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::BadParams("detour scales must be positive".into()));
    }
    if ts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadParams("detour scales must be sorted".into()));
    }
    let pairs = candidate_pairs(g.vertex_count(), sampler)?;
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let min_t = ts.first().copied().unwrap_or(0.0);
    for &(x, y) in &pairs {
        if x != y && d.get(x, y) >= WITNESS_SEPARATION * min_t {
            triples.push([x, y, middle_vertex(g, d, x, y)]);
        }
    }

    let mut entries = Vec::with_capacity(ts.len());
    for &t in ts {
        let admissible: Vec<[usize; 3]> = triples
            .iter()
            .copied()
            .filter(|&[x, y, z]| {
                d.get(x, y) >= WITNESS_SEPARATION * t
                    && !in_open_ball(d, z, x, t)
                    && !in_open_ball(d, z, y, t)
            })
            .collect();
        if admissible.is_empty() {
            return Err(Error::NoAdmissibleTriple(t));
        }
        let lengths: Vec<f64> = admissible
            .par_iter()
            .map(|&[x, y, z]| detour_unchecked(g, d, x, y, z, t).unwrap_or(f64::INFINITY))
            .collect();
        let (k, g_hat) =
            lengths
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
                );
        entries.push(DetourEntry {
            t,
            g_hat,
            witness: admissible[k],
            admissible: admissible.len(),
        });
    }
    Ok(DetourProfile {
        entries,
        sampler: *sampler,
        separation: WITNESS_SEPARATION,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetourVerdict {
    pub band: Band,
    /// Minimum of `g_hat(t)/t` over the tail (`inf` if all tail entries are).
    #[serde(with = "inf_as_string")]
    pub tail_min_ratio: f64,
    pub tail_len: usize,
    pub threshold: f64,
}

/// Tail = the larger half of the scales, at least two entries.
pub fn detour_verdict(profile: &DetourProfile, th: &Thresholds) -> Result<DetourVerdict> {
    let n = profile.entries.len();
    if n == 0 {
        return Err(Error::EmptyProfile);
    }
    if n < 2 {
        return Ok(DetourVerdict {
            band: Band::Inconclusive,
            tail_min_ratio: profile.entries[0].ratio(),
            tail_len: n,
            threshold: th.detour,
        });
    }
    let tail_len = n.div_ceil(2).max(2);
    let tail = &profile.entries[n - tail_len..];
    let tail_min_ratio = tail
        .iter()
        .map(DetourEntry::ratio)
        .fold(f64::INFINITY, f64::min);
    let band = if tail_min_ratio > th.detour {
        Band::HyperbolicConsistent
    } else {
        Band::NotHyperbolicConsistent
    };
    Ok(DetourVerdict {
        band,
        tail_min_ratio,
        tail_len,
        threshold: th.detour,
    })
}
