use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_graph, Edge, MetricGraph};
use crate::error::{Error, Result};

/// Vertex degree of the order-7 triangular tessellation.
const TESSELLATION_DEGREE: usize = 7;

/// Test-space generators.
///
/// Textual form (used by the CLI): `kind:arg[,key=value...]`, e.g.
/// `grid_plane:40`, `grid_plane:40,octile=false`, `hyperbolic_tessellation:6`,
/// `random_tree:200`, `cycle:6`, `path:5`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `n × n` lattice with unit axis edges, plus `√2` diagonals when `octile`.
    GridPlane {
        n: usize,
        octile: bool,
    },
    /// Breadth-first ball of radius `layers` in the 1-skeleton of the
    /// order-7 triangular tessellation of the hyperbolic plane.
    HyperbolicTessellation {
        layers: usize,
    },
    /// Uniform random recursive tree on `n` vertices, unit edges.
    RandomTree {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    Path {
        n: usize,
    },
}

impl Generator {
    pub fn kind(&self) -> &'static str {
        match self {
            Generator::GridPlane { .. } => "grid_plane",
            Generator::HyperbolicTessellation { .. } => "hyperbolic_tessellation",
            Generator::RandomTree { .. } => "random_tree",
            Generator::Cycle { .. } => "cycle",
            Generator::Path { .. } => "path",
        }
    }

    pub fn generate(&self, seed: u64) -> Result<MetricGraph> {
        match *self {
            Generator::GridPlane { n, octile } => grid_plane(n, octile),
            Generator::HyperbolicTessellation { layers } => hyperbolic_tessellation(layers),
            Generator::RandomTree { n } => random_tree(n, seed),
            Generator::Cycle { n } => cycle(n),
            Generator::Path { n } => path(n),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::GridPlane { n, octile } => write!(f, "grid_plane:{n},octile={octile}"),
            Generator::HyperbolicTessellation { layers } => {
                write!(f, "hyperbolic_tessellation:{layers}")
            }
            Generator::RandomTree { n } => write!(f, "random_tree:{n}"),
            Generator::Cycle { n } => write!(f, "cycle:{n}"),
            Generator::Path { n } => write!(f, "path:{n}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut positional = None;
        let mut octile = true;
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some(("octile", v)) => {
                    octile = v.parse().map_err(|_| {
                        Error::BadParams(format!("octile must be a bool, got `{v}`"))
                    })?
                }
                Some(("n" | "layers", v)) => positional = Some(v),
                Some((k, _)) => return Err(Error::BadParams(format!("unknown parameter `{k}`"))),
                None => positional = Some(part),
            }
        }
        let size = || -> Result<usize> {
            let v = positional
                .ok_or_else(|| Error::BadParams(format!("generator `{kind}` needs a size")))?;
            v.parse()
                .map_err(|_| Error::BadParams(format!("invalid size `{v}`")))
        };
        Ok(match kind {
            "grid_plane" => Generator::GridPlane { n: size()?, octile },
            "hyperbolic_tessellation" => Generator::HyperbolicTessellation { layers: size()? },
            "random_tree" => Generator::RandomTree { n: size()? },
            "cycle" => Generator::Cycle { n: size()? },
            "path" => Generator::Path { n: size()? },
            other => return Err(Error::UnknownGenerator(other.to_string())),
        })
    }
}

/// Builds a generator from its id and positional parameters.
pub fn gen_space(kind: &str, params: &[usize], seed: u64) -> Result<MetricGraph> {
    let first = || {
        params
            .first()
            .copied()
            .ok_or_else(|| Error::BadParams(format!("generator `{kind}` needs a size")))
    };
    let g = match kind {
        "grid_plane" => Generator::GridPlane {
            n: first()?,
            octile: params.get(1).is_none_or(|&o| o != 0),
        },
        "hyperbolic_tessellation" => Generator::HyperbolicTessellation { layers: first()? },
        "random_tree" => Generator::RandomTree { n: first()? },
        "cycle" => Generator::Cycle { n: first()? },
        "path" => Generator::Path { n: first()? },
        other => return Err(Error::UnknownGenerator(other.to_string())),
    };
    g.generate(seed)
}

fn grid_plane(n: usize, octile: bool) -> Result<MetricGraph> {
    if n == 0 {
        return Err(Error::BadParams("grid_plane needs n >= 1".into()));
    }
    let idx = |row: usize, col: usize| row * n + col;
    let mut edges = Vec::new();
    for row in 0..n {
        for col in 0..n {
            if col + 1 < n {
                edges.push(Edge::new(idx(row, col), idx(row, col + 1), 1.0));
            }
            if row + 1 < n {
                edges.push(Edge::new(idx(row, col), idx(row + 1, col), 1.0));
                if octile {
                    if col + 1 < n {
                        edges.push(Edge::new(idx(row, col), idx(row + 1, col + 1), SQRT_2));
                    }
                    if col > 0 {
                        edges.push(Edge::new(idx(row, col), idx(row + 1, col - 1), SQRT_2));
                    }
                }
            }
        }
    }
    build_graph(n * n, edges)
}

/// Ring-by-ring construction. Every edge of ring `k` bounds one outward
/// triangle whose apex is a vertex of ring `k + 1` shared by both endpoints;
/// a ring vertex with `p` inward neighbours gets `3 - p` further private
/// children so that its degree reaches 7.
fn hyperbolic_tessellation(layers: usize) -> Result<MetricGraph> {
    let mut edges = Vec::new();
    let mut parents: Vec<usize> = vec![0];
    let mut ring: Vec<usize> = Vec::new();
    let mut next_id = 1;

    if layers >= 1 {
        ring = (1..=TESSELLATION_DEGREE).collect();
        next_id = TESSELLATION_DEGREE + 1;
        parents.extend(std::iter::repeat_n(1, TESSELLATION_DEGREE));
        for &v in &ring {
            edges.push(Edge::new(0, v, 1.0));
        }
        push_ring_edges(&ring, &mut edges);
    }

    for _ in 1..layers {
        let m = ring.len();
        let shared: Vec<usize> = (0..m).map(|i| next_id + i).collect();
        next_id += m;
        parents.extend(std::iter::repeat_n(2, m));

        let mut next_ring = Vec::new();
        for (i, &v) in ring.iter().enumerate() {
            let own = shared[i];
            let after = shared[(i + 1) % m];
            edges.push(Edge::new(v, own, 1.0));
            edges.push(Edge::new(v, after, 1.0));
            next_ring.push(own);
            let private = TESSELLATION_DEGREE - 4 - parents[v];
            for _ in 0..private {
                let c = next_id;
                next_id += 1;
                parents.push(1);
                edges.push(Edge::new(v, c, 1.0));
                next_ring.push(c);
            }
        }
        push_ring_edges(&next_ring, &mut edges);
        ring = next_ring;
    }

    debug_assert_eq!(parents.len(), next_id);
    build_graph(next_id, edges)
}

fn push_ring_edges(ring: &[usize], edges: &mut Vec<Edge>) {
    let m = ring.len();
    for i in 0..m {
        edges.push(Edge::new(ring[i], ring[(i + 1) % m], 1.0));
    }
}

fn random_tree(n: usize, seed: u64) -> Result<MetricGraph> {
    if n == 0 {
        return Err(Error::BadParams("random_tree needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<Edge> = (1..n)
        .map(|i| Edge::new(rng.gen_range(0..i), i, 1.0))
        .collect();
    build_graph(n, edges)
}

fn cycle(n: usize) -> Result<MetricGraph> {
    if n < 3 {
        return Err(Error::BadParams("cycle needs n >= 3".into()));
    }
    build_graph(n, (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0)))
}

fn path(n: usize) -> Result<MetricGraph> {
    if n == 0 {
        return Err(Error::BadParams("path needs n >= 1".into()));
    }
    build_graph(n, (1..n).map(|i| Edge::new(i - 1, i, 1.0)))
}
