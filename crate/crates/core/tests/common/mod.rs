//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use hyperthin::space::{build_graph, Edge, MetricGraph};
use proptest::prelude::*;

/// Floyd-Warshall over the edge list.
pub fn floyd_warshall(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.length);
        d[e.v][e.u] = d[e.v][e.u].min(e.length);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Plain quadratic Rips constant of three vertex paths, no early exits.
#[allow(clippy::needless_range_loop)]
pub fn naive_delta(d: &[Vec<f64>], sides: [&[usize]; 3]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..3 {
        for &p in sides[i] {
            let mut near = f64::INFINITY;
            for j in 0..3 {
                if j == i {
                    continue;
                }
                for &q in sides[j] {
                    near = near.min(d[p][q]);
                }
            }
            best = best.max(near);
        }
    }
    best
}

/// Connected random graphs: a random spanning tree plus extra edges.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = MetricGraph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let tree = (1..n).map(|i| (0..i, 1u32..=40)).collect::<Vec<_>>();
            let extra = prop::collection::vec((0..n, 0..n, 1u32..=40), 0..2 * n);
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut edges: Vec<Edge> = tree
                .into_iter()
                .enumerate()
                .map(|(i, (p, w))| Edge::new(p, i + 1, w as f64 / 8.0))
                .collect();
            edges.extend(
                extra
                    .into_iter()
                    .filter(|(u, v, _)| u != v)
                    .map(|(u, v, w)| Edge::new(u, v, w as f64 / 8.0)),
            );
            build_graph(n, edges).expect("spanning tree keeps it connected")
        })
}

/// Random trees with positive edge lengths.
pub fn arb_tree(max_n: usize) -> impl Strategy<Value = MetricGraph> {
    (2..=max_n)
        .prop_flat_map(|n| (1..n).map(|i| (0..i, 1u32..=16)).collect::<Vec<_>>())
        .prop_map(|parents| {
            let n = parents.len() + 1;
            let edges: Vec<Edge> = parents
                .into_iter()
                .enumerate()
                .map(|(i, (p, w))| Edge::new(p, i + 1, w as f64 / 4.0))
                .collect();
            build_graph(n, edges).unwrap()
        })
}

/// Closed-form shortest-path distance on the octile lattice.
pub fn octile(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dx = a.0.abs_diff(b.0) as f64;
    let dy = a.1.abs_diff(b.1) as f64;
    dx.max(dy) - dx.min(dy) + std::f64::consts::SQRT_2 * dx.min(dy)
}
