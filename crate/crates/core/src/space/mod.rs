//! Metric graphs: the finite stand-in for a geodesic space.
//!
//! A [`MetricGraph`] is a connected, undirected graph with positive edge
//! lengths. Interior points of geodesics are realized by subdividing edges
//! (see [`subdivide`]); every downstream quantity computed on vertices is then
//! accurate up to an additive error bounded by the longest edge.

mod gen;
mod io;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gen::{gen_space, Generator};
pub use io::{load_graph, parse_graph, save_graph, write_graph};

/// Absolute tolerance used for every distance comparison.
pub const EPS: f64 = 1e-9;

/// `a == b` up to [`EPS`], loosened proportionally for large magnitudes.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS * (1.0 + a.abs().max(b.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn new(u: usize, v: usize, length: f64) -> Self {
        Edge { u, v, length }
    }
}

impl From<(usize, usize, f64)> for Edge {
    fn from((u, v, length): (usize, usize, f64)) -> Self {
        Edge { u, v, length }
    }
}

/// Weighted undirected connected graph with strictly positive edge lengths.
///
/// Edges are stored canonically (`u < v`, sorted, parallel edges merged to the
/// shortest one). Adjacency lists are sorted by neighbour index, which is what
/// makes the lexicographic geodesic tie-break cheap.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    labels: Option<Vec<String>>,
    resolution: f64,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.edges == other.edges
            && self.labels == other.labels
            && self.resolution == other.resolution
    }
}

impl MetricGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Maximum segment length recorded by [`subdivide`]; `0` for graphs that
    /// were never subdivided.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Longest edge. This bounds the gap between vertex-sampled quantities and
    /// their continuous counterparts whether or not the graph was subdivided.
    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Sorted `(neighbour, length)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count {
            return Err(Error::BadParams(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.vertex_count
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub(crate) fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    /// True when the graph has no cycles (connectedness is an invariant).
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                vertex_count: self.vertex_count,
            })
        }
    }

    /// Length of the explicit walk `path`, or `None` if some step is not an
    /// edge.
    pub fn path_length(&self, path: &[usize]) -> Option<f64> {
        path.windows(2)
            .map(|w| self.edge_length(w[0], w[1]))
            .sum::<Option<f64>>()
    }

    pub fn edge_length(&self, u: usize, v: usize) -> Option<f64> {
        let adj = self.adjacency.get(u)?;
        adj.binary_search_by(|(w, _)| w.cmp(&v))
            .ok()
            .map(|i| adj[i].1)
    }
}

/// Validates, canonicalizes and checks connectivity.
pub fn build_graph<E: Into<Edge>>(
    vertex_count: usize,
    edges: impl IntoIterator<Item = E>,
) -> Result<MetricGraph> {
    let mut canon: Vec<Edge> = Vec::new();
    for e in edges {
        let Edge { u, v, length } = e.into();
        for w in [u, v] {
            if w >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    vertex: w,
                    vertex_count,
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::NonPositiveLength { u, v, length });
        }
        canon.push(Edge::new(u.min(v), u.max(v), length));
    }
    canon.sort_by(|a, b| {
        (a.u, a.v)
            .cmp(&(b.u, b.v))
            .then(a.length.total_cmp(&b.length))
    });
    canon.dedup_by(|later, first| later.u == first.u && later.v == first.v);

    let mut adjacency = vec![Vec::new(); vertex_count];
    for e in &canon {
        adjacency[e.u].push((e.v, e.length));
        adjacency[e.v].push((e.u, e.length));
    }
    for adj in &mut adjacency {
        adj.sort_by_key(|&(w, _)| w);
    }

    let components = count_components(vertex_count, &adjacency);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }

    Ok(MetricGraph {
        vertex_count,
        edges: canon,
        labels: None,
        resolution: 0.0,
        adjacency,
    })
}

fn count_components(n: usize, adjacency: &[Vec<(usize, f64)>]) -> usize {
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &(w, _) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Replaces every edge of length `L` by `ceil(L / h)` equal segments.
///
/// New vertices are appended after the original ones, edge by edge in
/// canonical order, walking from `u` towards `v`. Original vertex indices and
/// the distances between them are unchanged.
pub fn subdivide(g: &MetricGraph, h: f64) -> Result<MetricGraph> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::NonPositiveResolution(h));
    }
    let mut next = g.vertex_count;
    let mut edges = Vec::with_capacity(g.edges.len());
    let mut resolution: f64 = 0.0;
    for e in &g.edges {
        // guard against L/h landing a hair above an integer
        let pieces = ((e.length / h) - EPS).ceil().max(1.0) as usize;
        let seg = e.length / pieces as f64;
        resolution = resolution.max(seg);
        let mut prev = e.u;
        for _ in 1..pieces {
            edges.push(Edge::new(prev, next, seg));
            prev = next;
            next += 1;
        }
        edges.push(Edge::new(prev, e.v, seg));
    }
    let mut out = build_graph(next, edges)?.with_resolution(resolution);
    if let Some(labels) = &g.labels {
        let mut labels = labels.clone();
        labels.resize(next, String::new());
        out.labels = Some(labels);
    }
    Ok(out)
}

/// Exact all-pairs shortest-path distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.data[u * self.n..(u + 1) * self.n]
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Builds a matrix from explicit rows; used for metrics that do not come
    /// from a graph (tests, external tools).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::BadParams(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            data.extend(r);
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Multiplies every entry by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|d| d * k).collect(),
        }
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties on vertex index for determinism
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`, skipping vertices for which `blocked` returns true.
/// Unreachable vertices get `f64::INFINITY`.
pub fn single_source(g: &MetricGraph, source: usize, blocked: impl Fn(usize) -> bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count];
    if blocked(source) {
        return dist;
    }
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex }) = heap.pop() {
        if d > dist[vertex] {
            continue;
        }
        for &(w, len) in &g.adjacency[vertex] {
            let nd = d + len;
            if nd < dist[w] && !blocked(w) {
                dist[w] = nd;
                heap.push(HeapItem {
                    dist: nd,
                    vertex: w,
                });
            }
        }
    }
    dist
}

/// One Dijkstra per source, in parallel; rows are assembled in source order.
pub fn all_pairs_distances(g: &MetricGraph) -> DistanceMatrix {
    let n = g.vertex_count;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| single_source(g, s, |_| false))
        .collect();
    let mut data = Vec::with_capacity(n * n);
    for r in rows {
        data.extend(r);
    }
    DistanceMatrix { n, data }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub vertices: Vec<usize>,
    pub length: f64,
}

impl Geodesic {
    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self
            .vertices
            .last()
            .expect("geodesic has at least one vertex")
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn reversed(&self) -> Geodesic {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Geodesic {
            vertices,
            length: self.length,
        }
    }
}

#[inline]
fn on_geodesic_step(d: &DistanceMatrix, from: usize, to: usize, target: usize, len: f64) -> bool {
    approx_eq(len + d.get(to, target), d.get(from, target))
}

/// The canonical geodesic between `u` and `v`.
///
/// For the unordered pair `{u, v}` the canonical geodesic is the
/// lexicographically smallest shortest vertex sequence running from the
/// smaller index to the larger one; `shortest_path(v, u)` is its reverse, so
/// both orientations describe the same side of a triangle.
pub fn shortest_path(g: &MetricGraph, d: &DistanceMatrix, u: usize, v: usize) -> Geodesic {
    let (s, t) = (u.min(v), u.max(v));
    let mut vertices = vec![s];
    let mut cur = s;
    while cur != t {
        let next = g.adjacency[cur]
            .iter()
            .find(|&&(w, len)| on_geodesic_step(d, cur, w, t, len))
            .map(|&(w, _)| w)
            .expect("distance matrix consistent with graph");
        vertices.push(next);
        cur = next;
    }
    if u > v {
        vertices.reverse();
    }
    Geodesic {
        vertices,
        length: d.get(u, v),
    }
}

/// Up to `k` geodesics between `u` and `v`, canonical one first.
///
/// Enumeration follows the same orientation rule as [`shortest_path`]: paths
/// are listed in lexicographic order from the smaller endpoint.
pub fn geodesics(
    g: &MetricGraph,
    d: &DistanceMatrix,
    u: usize,
    v: usize,
    k: usize,
) -> Vec<Geodesic> {
    let (s, t) = (u.min(v), u.max(v));
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    let mut path = vec![s];
    // explicit DFS stack: (vertex, next adjacency slot to try)
    let mut stack = vec![(s, 0usize)];
    while let Some(&(cur, start)) = stack.last() {
        if cur == t {
            let mut vertices = path.clone();
            if u > v {
                vertices.reverse();
            }
            out.push(Geodesic {
                vertices,
                length: d.get(u, v),
            });
            if out.len() == k {
                break;
            }
            stack.pop();
            path.pop();
            continue;
        }
        let adj = &g.adjacency[cur];
        let found = (start..adj.len()).find(|&i| on_geodesic_step(d, cur, adj[i].0, t, adj[i].1));
        match found {
            Some(i) => {
                stack.last_mut().unwrap().1 = i + 1;
                stack.push((adj[i].0, 0));
                path.push(adj[i].0);
            }
            None => {
                stack.pop();
                path.pop();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> MetricGraph {
        build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn cycle(n: usize) -> MetricGraph {
        build_graph(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn build_examples() {
        let d = all_pairs_distances(&path3());
        assert_eq!(d.get(0, 2), 2.0);

        let g = build_graph(2, [(0, 1, 5.0)]).unwrap();
        assert_eq!(all_pairs_distances(&g).get(0, 1), 5.0);

        let g = build_graph(3, [(0, 1, 3.0), (1, 2, 4.0), (0, 2, 5.0)]).unwrap();
        assert_eq!(all_pairs_distances(&g).get(0, 2), 5.0);
    }

    #[test]
    fn build_rejects_bad_input() {
        assert!(matches!(
            build_graph(3, [(0, 1, 1.0)]),
            Err(Error::DisconnectedGraph { components: 2 })
        ));
        assert!(matches!(
            build_graph(2, [(0, 1, 0.0)]),
            Err(Error::NonPositiveLength { .. })
        ));
        assert!(matches!(
            build_graph(2, [(0, 1, f64::NAN)]),
            Err(Error::NonPositiveLength { .. })
        ));
        assert!(matches!(
            build_graph(2, [(1, 1, 1.0)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            build_graph(2, [(0, 2, 1.0)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn canonical_edge_order() {
        let g = build_graph(3, [(2, 1, 1.0), (1, 0, 2.0), (0, 1, 1.5)]).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1, 1.5), Edge::new(1, 2, 1.0)]);
    }

    #[test]
    fn subdivide_examples() {
        let unit = build_graph(2, [(0, 1, 1.0)]).unwrap();
        let s = subdivide(&unit, 0.25).unwrap();
        assert_eq!(s.vertex_count(), 5);
        assert!(s.edges().iter().all(|e| e.length == 0.25));
        assert_eq!(s.resolution(), 0.25);

        let s = subdivide(&unit, 0.3).unwrap();
        assert_eq!(s.edges().len(), 4);
        assert!(s.edges().iter().all(|e| e.length == 0.25));

        for h in [0.1, 0.3, 0.7, 2.0] {
            let s = subdivide(&path3(), h).unwrap();
            assert!(approx_eq(all_pairs_distances(&s).get(0, 2), 2.0));
        }
        assert!(matches!(
            subdivide(&unit, 0.0),
            Err(Error::NonPositiveResolution(_))
        ));
    }

    #[test]
    fn apsp_examples() {
        assert_eq!(all_pairs_distances(&cycle(4)).get(0, 2), 2.0);
        assert_eq!(all_pairs_distances(&cycle(6)).get(0, 3), 3.0);
        let star = build_graph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(all_pairs_distances(&star).get(1, 3), 2.0);
    }

    #[test]
    fn canonical_geodesics() {
        let g = path3();
        let d = all_pairs_distances(&g);
        let p = shortest_path(&g, &d, 0, 2);
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.length, 2.0);

        let c4 = cycle(4);
        let d4 = all_pairs_distances(&c4);
        assert_eq!(shortest_path(&c4, &d4, 0, 2).vertices, vec![0, 1, 2]);
        assert_eq!(shortest_path(&c4, &d4, 2, 0).vertices, vec![2, 1, 0]);

        let p = shortest_path(&g, &d, 1, 1);
        assert_eq!(p.vertices, vec![1]);
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn geodesic_enumeration_is_lexicographic() {
        let c4 = cycle(4);
        let d = all_pairs_distances(&c4);
        let all = geodesics(&c4, &d, 0, 2, 10);
        let seqs: Vec<_> = all.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(seqs, vec![vec![0, 1, 2], vec![0, 3, 2]]);
        assert_eq!(all[0], shortest_path(&c4, &d, 0, 2));
        let rev = geodesics(&c4, &d, 2, 0, 1);
        assert_eq!(rev[0].vertices, vec![2, 1, 0]);
    }

    #[test]
    fn tree_detection() {
        assert!(path3().is_tree());
        assert!(!cycle(3).is_tree());
    }
}
