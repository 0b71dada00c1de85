//! Tower space over a base graph, the rescaled four-point proxy for
//! asymptotic cones, and the tree-path property check.
//!
//! The tower over `(X, d)` with basepoint `p` glues the copies `X × {i}`,
//! `i = 1..=N`, each with its metric multiplied by `i`, along a spine through
//! the copies of `p`. Its path metric is
//!
//! ```text
//! d~((x,i),(x',i)) = i·d(x,x')
//! d~((x,i),(x',j)) = i·d(x,p) + j·d(x',p) + |i − j|      (i ≠ j)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rips::{four_point_defect, make_triangle, rips_delta};
use crate::sampler::SamplerSpec;
use crate::space::{
    all_pairs_distances, build_graph, save_graph, shortest_path, write_graph, DistanceMatrix, Edge,
    MetricGraph, EPS,
};

#[derive(Debug, Clone)]
pub struct TowerSpace {
    pub base: MetricGraph,
    pub basepoint: usize,
    pub levels: usize,
    pub spine_step: f64,
    /// The realized product graph.
    pub graph: MetricGraph,
    base_distances: DistanceMatrix,
}

/// Where a tower vertex lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TowerPoint {
    Level {
        level: usize,
        x: usize,
    },
    /// Interior spine vertex at height `height` (strictly between levels).
    Spine {
        height: f64,
    },
}

/// Sidecar written next to a saved tower graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerMeta {
    pub base_hash: String,
    pub p: usize,
    pub levels: usize,
    pub spine_step: f64,
}

/// SHA-256 of the base graph's canonical text form.
pub fn graph_hash(g: &MetricGraph) -> String {
    let digest = Sha256::digest(write_graph(g).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn build_tower(
    g: &MetricGraph,
    p: usize,
    levels: usize,
    spine_step: f64,
) -> Result<TowerSpace> {
    if p >= g.vertex_count() {
        return Err(Error::BadBasepoint(p));
    }
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let per_unit = if spine_step > 0.0 && spine_step <= 1.0 {
        let k = (1.0 / spine_step).round();
        if ((1.0 / spine_step) - k).abs() > 1e-9 {
            None
        } else {
            Some(k as usize)
        }
    } else {
        None
    };
    let per_unit = per_unit
        .ok_or_else(|| Error::BadParams(format!("spine step {spine_step} must divide 1")))?;

    let n = g.vertex_count();
    let seg = 1.0 / per_unit as f64;
    let mut edges = Vec::with_capacity(levels * g.edges().len() + levels * per_unit);
    for i in 1..=levels {
        let off = (i - 1) * n;
        let scale = i as f64;
        edges.extend(
            g.edges()
                .iter()
                .map(|e| Edge::new(off + e.u, off + e.v, scale * e.length)),
        );
    }
    let mut next = levels * n;
    for i in 1..levels {
        let mut prev = (i - 1) * n + p;
        for _ in 1..per_unit {
            edges.push(Edge::new(prev, next, seg));
            prev = next;
            next += 1;
        }
        edges.push(Edge::new(prev, i * n + p, seg));
    }
    let graph = build_graph(next, edges)?;
    Ok(TowerSpace {
        base: g.clone(),
        basepoint: p,
        levels,
        spine_step: seg,
        graph,
        base_distances: all_pairs_distances(g),
    })
}

impl TowerSpace {
    pub fn level_vertex(&self, level: usize, x: usize) -> usize {
        assert!((1..=self.levels).contains(&level) && x < self.base.vertex_count());
        (level - 1) * self.base.vertex_count() + x
    }

    pub fn locate(&self, v: usize) -> TowerPoint {
        let n = self.base.vertex_count();
        if v < self.levels * n {
            return TowerPoint::Level {
                level: v / n + 1,
                x: v % n,
            };
        }
        let per_unit = (1.0 / self.spine_step).round() as usize;
        let k = v - self.levels * n;
        let gap = k / (per_unit - 1);
        let pos = k % (per_unit - 1) + 1;
        TowerPoint::Spine {
            height: (gap + 1) as f64 + pos as f64 * self.spine_step,
        }
    }

    /// Closed-form tower distance between level points.
    pub fn tilde_distance(&self, i: usize, x: usize, j: usize, x2: usize) -> f64 {
        let d = &self.base_distances;
        if i == j {
            i as f64 * d.get(x, x2)
        } else {
            let p = self.basepoint;
            i as f64 * d.get(x, p) + j as f64 * d.get(x2, p) + (i as f64 - j as f64).abs()
        }
    }

    pub fn base_distances(&self) -> &DistanceMatrix {
        &self.base_distances
    }

    pub fn meta(&self) -> TowerMeta {
        TowerMeta {
            base_hash: graph_hash(&self.base),
            p: self.basepoint,
            levels: self.levels,
            spine_step: self.spine_step,
        }
    }

    /// Writes the tower graph to `path` and the sidecar to `path.json`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        save_graph(&self.graph, path)?;
        let mut side = path.as_os_str().to_owned();
        side.push(".json");
        let json = serde_json::to_string_pretty(&self.meta()).expect("serializable");
        std::fs::write(&side, json).map_err(|e| Error::io(side, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TowerRatio {
    /// Empirical sup of δ/pr over sampled tower triangles.
    pub sup_tower: f64,
    /// Empirical sup of δ/pr over sampled base triangles.
    pub sup_base: f64,
    pub tower_samples: usize,
    pub base_samples: usize,
}

fn sup_ratio(g: &MetricGraph, d: &DistanceMatrix, triples: &[[usize; 3]]) -> f64 {
    triples
        .par_iter()
        .map(|&[a, b, c]| {
            let t = make_triangle(g, d, a, b, c);
            if t.perimeter > EPS {
                rips_delta(d, &t) / t.perimeter
            } else {
                0.0
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Compares sup δ/pr over the tower with the same quantity over the base.
///
/// Random mode spends half its budget on single-level triangles (a random
/// level, three random base vertices) and half on triangles drawn uniformly
/// from all tower vertices, which are almost always cross-level.
pub fn tower_ratio_check(tower: &TowerSpace, sampler: &SamplerSpec) -> Result<TowerRatio> {
    let n = tower.base.vertex_count();
    let base_triples = sampler.triples(n)?;
    let tower_triples: Vec<[usize; 3]> = match *sampler {
        SamplerSpec::Exhaustive => sampler.triples(tower.graph.vertex_count())?,
        SamplerSpec::Random { samples, seed } => {
            let mut rng = SamplerSpec::rng(seed ^ 0x74_6f77_6572);
            let total = tower.graph.vertex_count();
            let mut out = Vec::with_capacity(samples);
            for k in 0..samples {
                if k % 2 == 0 {
                    let level = rng.gen_range(1..=tower.levels);
                    out.push(std::array::from_fn(|_| {
                        tower.level_vertex(level, rng.gen_range(0..n))
                    }));
                } else {
                    out.push(std::array::from_fn(|_| rng.gen_range(0..total)));
                }
            }
            out
        }
    };
    if base_triples.is_empty() || tower_triples.is_empty() {
        return Err(Error::EmptyProfile);
    }
    let tower_d = all_pairs_distances(&tower.graph);
    Ok(TowerRatio {
        sup_tower: sup_ratio(&tower.graph, &tower_d, &tower_triples),
        sup_base: sup_ratio(&tower.base, tower.base_distances(), &base_triples),
        tower_samples: tower_triples.len(),
        base_samples: base_triples.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeOptions {
    pub sampler: SamplerSpec,
    /// Quadruples at scale `s` have all pairwise distances in
    /// `[s, window · s]`; `f64::INFINITY` keeps only the lower bound.
    pub window: f64,
}

impl ConeOptions {
    pub fn new(sampler: SamplerSpec) -> Self {
        ConeOptions {
            sampler,
            window: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDefectCurve {
    pub scales: Vec<f64>,
    /// Max four-point defect at each scale, divided by the scale; `None`
    /// where no quadruple fit the window.
    pub defects: Vec<Option<f64>>,
    /// Accepted quadruples per scale.
    pub accepted: Vec<usize>,
    pub window: f64,
    pub sampler: SamplerSpec,
    /// Always true: the curve is a finite-scale stand-in for cone tree-ness.
    pub proxy: bool,
}

impl ConeDefectCurve {
    pub fn csv(&self) -> String {
        let mut out = String::from("t,defect\n");
        for (s, d) in self.scales.iter().zip(&self.defects) {
            match d {
                Some(d) => writeln!(out, "{s},{d}"),
                None => writeln!(out, "{s},"),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }
}

fn in_window(x: f64, lo: f64, hi: f64) -> bool {
    x >= lo - EPS * (1.0 + lo) && x <= hi + EPS * (1.0 + hi)
}

/// `count` geometrically spaced scales from `smallest` to half the diameter,
/// the largest scale at which a window of 2 still fits inside the graph.
pub fn default_scales(d: &DistanceMatrix, smallest: f64, count: usize) -> Result<Vec<f64>> {
    let top = d.diameter() / 2.0;
    if !(smallest > 0.0) || count < 2 || top <= smallest {
        return Err(Error::BadParams(format!(
            "cannot place {count} scales between {smallest} and {top}"
        )));
    }
    let ratio = (top / smallest).powf(1.0 / (count - 1) as f64);
    let mut out: Vec<f64> = (0..count)
        .map(|k| smallest * ratio.powi(k as i32))
        .collect();
    out[count - 1] = top;
    Ok(out)
}

/// Scale-by-scale four-point defect of the metric `d / s`.
///
/// Random mode draws, per attempt, an anchor `w` and three further vertices
/// from the anchor's annulus `[s, window·s]`, keeping the quadruple only if
/// all six distances fall in the window. Every scale replays the same random
/// stream. Exhaustive mode scans all quadruples.
pub fn rescaled_four_point(
    d: &DistanceMatrix,
    scales: &[f64],
    opts: &ConeOptions,
) -> Result<ConeDefectCurve> {
    if d.len() < 4 {
        return Err(Error::TooFewVertices(d.len()));
    }
    if scales.iter().any(|&s| !(s > 0.0 && s.is_finite()))
        || scales.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::BadParams(
            "scales must be positive and increasing".into(),
        ));
    }
    if !(opts.window >= 1.0) {
        return Err(Error::BadParams("window must be at least 1".into()));
    }
    let diameter = d.diameter();
    if let Some(&s) = scales.iter().find(|&&s| s > diameter + EPS) {
        return Err(Error::ScaleExceedsDiameter { scale: s, diameter });
    }
    opts.sampler.check()?;

    let n = d.len();
    let mut defects = Vec::with_capacity(scales.len());
    let mut accepted = Vec::with_capacity(scales.len());
    for &s in scales {
        let hi = opts.window * s;
        let keep =
            |q: [usize; 4]| (0..4).all(|i| (i + 1..4).all(|j| in_window(d.get(q[i], q[j]), s, hi)));
        let (best, count) = match opts.sampler {
            SamplerSpec::Exhaustive => {
                let quads = opts.sampler.quadruples(n)?;
                quads
                    .par_iter()
                    .filter(|&&q| keep(q))
                    .map(|&q| (four_point_defect(d, q), 1usize))
                    .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1))
            }
            SamplerSpec::Random { samples, seed } => {
                let mut rng = SamplerSpec::rng(seed);
                let mut quads = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let w = rng.gen_range(0..n);
                    let row = d.row(w);
                    let ring: Vec<usize> = (0..n).filter(|&v| in_window(row[v], s, hi)).collect();
                    if ring.len() < 3 {
                        continue;
                    }
                    let pick: Vec<usize> = ring.choose_multiple(&mut rng, 3).copied().collect();
                    quads.push([w, pick[0], pick[1], pick[2]]);
                }
                quads
                    .par_iter()
                    .filter(|&&q| keep(q))
                    .map(|&q| (four_point_defect(d, q), 1usize))
                    .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1))
            }
        };
        defects.push((count > 0).then(|| best / s));
        accepted.push(count);
    }
    Ok(ConeDefectCurve {
        scales: scales.to_vec(),
        defects,
        accepted,
        window: opts.window,
        sampler: opts.sampler,
        proxy: true,
    })
}

/// Random walk from `x` until it first hits `y`. Steps avoid immediate
/// backtracking unless the current vertex is a leaf.
pub fn random_walk_to(g: &MetricGraph, x: usize, y: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut walk = vec![x];
    let mut prev: Option<usize> = None;
    let mut cur = x;
    while cur != y {
        let nbrs = g.neighbors(cur);
        let forward: Vec<usize> = nbrs
            .iter()
            .map(|&(w, _)| w)
            .filter(|&w| Some(w) != prev)
            .collect();
        let next = if forward.is_empty() {
            nbrs[0].0
        } else {
            forward[rng.gen_range(0..forward.len())]
        };
        prev = Some(cur);
        cur = next;
        walk.push(cur);
    }
    walk
}

/// Checks on random walks that every path between two vertices of a tree
/// passes through all vertices of the geodesic joining them.
pub fn tree_path_property(
    g: &MetricGraph,
    d: &DistanceMatrix,
    trials: usize,
    seed: u64,
) -> Result<bool> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    let n = g.vertex_count();
    if n < 2 {
        return Ok(true);
    }
    let mut rng = SamplerSpec::rng(seed);
    for _ in 0..trials {
        let x = rng.gen_range(0..n);
        let mut y = rng.gen_range(0..n - 1);
        if y >= x {
            y += 1;
        }
        let walk = random_walk_to(g, x, y, &mut rng);
        let mut seen = vec![false; n];
        for &v in &walk {
            seen[v] = true;
        }
        if !shortest_path(g, d, x, y).vertices.iter().all(|&v| seen[v]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::gen_space;

    #[test]
    fn single_level_is_the_base() {
        let g = gen_space("cycle", &[6], 0).unwrap();
        let t = build_tower(&g, 0, 1, 0.25).unwrap();
        assert_eq!(t.graph, g);
    }

    #[test]
    fn cross_level_formula() {
        // path 0-1-2, p = 0: d(1,p) = 1, d(2,p) = 2
        let g = gen_space("path", &[3], 0).unwrap();
        let t = build_tower(&g, 0, 5, 0.25).unwrap();
        assert_eq!(t.tilde_distance(2, 1, 3, 2), 9.0);
        let d = all_pairs_distances(&t.graph);
        assert!((d.get(t.level_vertex(2, 1), t.level_vertex(3, 2)) - 9.0).abs() < 1e-9);
        assert!((d.get(t.level_vertex(2, 0), t.level_vertex(5, 0)) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn spine_vertices_are_located() {
        let g = gen_space("path", &[2], 0).unwrap();
        let t = build_tower(&g, 1, 3, 0.25).unwrap();
        assert_eq!(t.graph.vertex_count(), 6 + 2 * 3);
        assert_eq!(t.locate(3), TowerPoint::Level { level: 2, x: 1 });
        assert_eq!(t.locate(6), TowerPoint::Spine { height: 1.25 });
        assert_eq!(t.locate(11), TowerPoint::Spine { height: 2.75 });
    }

    #[test]
    fn bad_tower_params() {
        let g = gen_space("cycle", &[6], 0).unwrap();
        assert!(matches!(
            build_tower(&g, 6, 2, 0.25),
            Err(Error::BadBasepoint(6))
        ));
        assert!(matches!(
            build_tower(&g, 0, 0, 0.25),
            Err(Error::ZeroLevels)
        ));
        assert!(matches!(
            build_tower(&g, 0, 2, 0.3),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn tree_path_examples() {
        let g = gen_space("path", &[8], 0).unwrap();
        let d = all_pairs_distances(&g);
        assert!(tree_path_property(&g, &d, 50, 1).unwrap());
        let c = gen_space("cycle", &[4], 0).unwrap();
        let d = all_pairs_distances(&c);
        assert!(matches!(
            tree_path_property(&c, &d, 5, 1),
            Err(Error::NotATree)
        ));
    }

    #[test]
    fn cycle_walk_can_skip_the_geodesic() {
        // on a 4-cycle a walk 0 -> 3 -> 2 misses the canonical [0, 2] = 0,1,2
        let c = gen_space("cycle", &[4], 0).unwrap();
        let d = all_pairs_distances(&c);
        let mut rng = SamplerSpec::rng(3);
        let misses = (0..50).any(|_| {
            let w = random_walk_to(&c, 0, 2, &mut rng);
            !w.contains(&1)
        });
        assert!(misses);
        assert_eq!(shortest_path(&c, &d, 0, 2).vertices, vec![0, 1, 2]);
    }

    #[test]
    fn cone_on_tree_is_zero() {
        let g = gen_space("random_tree", &[150], 4).unwrap();
        let d = all_pairs_distances(&g);
        let c = rescaled_four_point(
            &d,
            &[1.0, 2.0, 4.0],
            &ConeOptions::new(SamplerSpec::random(2000, 1)),
        )
        .unwrap();
        assert!(c.defects.iter().all(|&x| x == Some(0.0)));
        assert!(c.accepted.iter().all(|&a| a > 0));
    }

    #[test]
    fn cone_rejects_large_scale() {
        let g = gen_space("cycle", &[8], 0).unwrap();
        let d = all_pairs_distances(&g);
        assert!(matches!(
            rescaled_four_point(&d, &[1.0, 5.0], &ConeOptions::new(SamplerSpec::Exhaustive)),
            Err(Error::ScaleExceedsDiameter { .. })
        ));
    }
}
