//! Thin-triangle constants of the Euclidean plane.
//!
//! Closed forms for the optimal isoceles triangle, and an independent
//! brute-force oracle that maximizes δ/pr over all plane triangles using
//! nothing but point-to-segment distances.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `((√5 − 1)/2)^(5/2) / 2`, the largest δ/pr of a plane triangle.
pub const ETA0: f64 = 0.150_141_553_000_388_8;

/// Initial samples per side before golden-section refinement.
const SIDE_SAMPLES: usize = 512;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eta0 {
    pub value: f64,
    /// Base angle (radians) of the extremal isoceles triangle.
    pub alpha0: f64,
}

pub fn eta0() -> Eta0 {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    Eta0 {
        value: golden.powf(2.5) / 2.0,
        alpha0: golden.acos(),
    }
}

fn check_base_angle(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::DomainError {
            value: alpha,
            domain: "(0, pi/2)",
        })
    }
}

/// Distance from the base midpoint to the legs, over the perimeter, for the
/// isoceles triangle with base angles `alpha`. This is δ/pr when
/// `alpha <= pi/3`; steeper triangles are fattest at a point of a leg.
pub fn isoceles_ratio(alpha: f64) -> Result<f64> {
    check_base_angle(alpha)?;
    let (s, c) = alpha.sin_cos();
    Ok(s * c / (2.0 * (1.0 + c)))
}

/// Distance from the base midpoint to the legs: `base · sin(alpha) / 2`.
pub fn isoceles_midpoint_delta(alpha: f64, base: f64) -> Result<f64> {
    check_base_angle(alpha)?;
    if !(base > 0.0 && base.is_finite()) {
        return Err(Error::DomainError {
            value: base,
            domain: "(0, inf)",
        });
    }
    Ok(base * alpha.sin() / 2.0)
}

pub type Point = [f64; 2];

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * ab[0] - p[0], a[1] + t * ab[1] - p[1]];
    q[0].hypot(q[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclidTriangle {
    pub points: [Point; 3],
}

impl EuclidTriangle {
    pub fn new(a: Point, b: Point, c: Point) -> Self {
        EuclidTriangle { points: [a, b, c] }
    }

    pub fn perimeter(&self) -> f64 {
        (0..3)
            .map(|i| dist(self.points[i], self.points[(i + 1) % 3]))
            .sum()
    }

    /// Triangle on base `[(0,0), (1,0)]` with base angles `alpha` (at the
    /// origin) and `beta`, rescaled to unit perimeter.
    pub fn from_base_angles(alpha: f64, beta: f64) -> Self {
        let left = beta.sin() / (alpha + beta).sin();
        let apex = [left * alpha.cos(), left * alpha.sin()];
        let raw = EuclidTriangle::new([0.0, 0.0], [1.0, 0.0], apex);
        let k = 1.0 / raw.perimeter();
        raw.map(|p| [p[0] * k, p[1] * k])
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        EuclidTriangle {
            points: self.points.map(f),
        }
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Continuous Rips constant of a plane triangle.
///
/// Along each side, the distance to the union of the other two sides is
/// sampled at 512 points and the best sample's bracket is refined by
/// golden-section search until it is shorter than `tol`.
pub fn euclid_triangle_delta(tri: &EuclidTriangle, tol: f64) -> f64 {
    let tol = if tol > 0.0 { tol } else { 1e-9 };
    let p = tri.points;
    let mut best: f64 = 0.0;
    for i in 0..3 {
        let (a, b) = (p[i], p[(i + 1) % 3]);
        let c = p[(i + 2) % 3];
        let len = dist(a, b);
        if len == 0.0 {
            continue;
        }
        // the other two sides are [b, c] and [c, a]
        let f = |s: f64| {
            let x = lerp(a, b, s);
            point_segment_distance(x, b, c).min(point_segment_distance(x, c, a))
        };
        let values: Vec<f64> = (0..=SIDE_SAMPLES)
            .map(|k| f(k as f64 / SIDE_SAMPLES as f64))
            .collect();
        let (k, &v) = values
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty");
        best = best.max(v);
        let lo = k.saturating_sub(1) as f64 / SIDE_SAMPLES as f64;
        let hi = (k + 1).min(SIDE_SAMPLES) as f64 / SIDE_SAMPLES as f64;
        best = best.max(golden_max(&f, lo, hi, tol / len));
    }
    best
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2).max(f((lo + hi) / 2.0))
}

/// δ/pr for the unit-perimeter triangle with base angles `(alpha, beta)`.
pub fn shape_ratio(alpha: f64, beta: f64, tol: f64) -> f64 {
    euclid_triangle_delta(&EuclidTriangle::from_base_angles(alpha, beta), tol)
}

fn admissible(alpha: f64, beta: f64) -> bool {
    alpha > 0.0 && beta >= alpha && alpha + beta < PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupSearch {
    pub sup_ratio: f64,
    /// Base angles `(alpha, beta)` of the maximizing shape, `alpha <= beta`.
    pub argmax_angles: [f64; 2],
    pub grid_resolution: usize,
    pub tol: f64,
    pub evaluations: usize,
}

/// Maximizes δ/pr over the shape space of plane triangles.
///
/// Shapes are parameterized by their base angles `alpha <= beta` with
/// `alpha + beta < pi` at unit perimeter. A `grid_resolution`² grid over
/// `(0, pi/2) × (0, pi)` is evaluated in parallel, then the best cell is
/// refined by a shrinking compass search.
pub fn euclid_sup_search(grid_resolution: usize, tol: f64) -> Result<SupSearch> {
    if grid_resolution < 100 {
        return Err(Error::BadParams(format!(
            "grid resolution must be at least 100 points per angle, got {grid_resolution}"
        )));
    }
    let n = grid_resolution;
    let da = FRAC_PI_2 / n as f64;
    let db = PI / n as f64;
    let cells: Vec<(f64, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| ((i as f64 + 0.5) * da, (j as f64 + 0.5) * db)))
        .filter(|&(a, b)| admissible(a, b))
        .collect();
    let scored: Vec<(f64, f64, f64)> = cells
        .par_iter()
        .map(|&(a, b)| (shape_ratio(a, b, tol), a, b))
        .collect();
    let mut evaluations = scored.len();
    // first maximum in grid order keeps the result deterministic
    let (mut best, mut a, mut b) =
        scored
            .iter()
            .copied()
            .fold((f64::NEG_INFINITY, 0.0, 0.0), |acc, x| {
                if x.0 > acc.0 {
                    x
                } else {
                    acc
                }
            });

    let mut step = da.max(db);
    while step > 1e-9 {
        let mut improved = false;
        for (sa, sb) in [
            (1.0, 0.0),
            (-1.0, 0.0),
            (0.0, 1.0),
            (0.0, -1.0),
            (1.0, 1.0),
            (-1.0, -1.0),
        ] {
            let (na, nb) = (a + sa * step, b + sb * step);
            if !admissible(na, nb) {
                continue;
            }
            let v = shape_ratio(na, nb, tol);
            evaluations += 1;
            if v > best {
                best = v;
                a = na;
                b = nb;
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }

    Ok(SupSearch {
        sup_ratio: best,
        argmax_angles: [a, b],
        grid_resolution,
        tol,
        evaluations,
    })
}
