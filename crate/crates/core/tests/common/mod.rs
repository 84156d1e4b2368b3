#![allow(dead_code)]

use qergo::ensembles::{random_degree_bounded, stream_rng, Stream};
use qergo::{build_graph, Graph, Potential};
use rand::Rng;

pub fn k4() -> Graph {
    build_graph(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4).unwrap()
}

pub fn petersen() -> Graph {
    let mut e = Vec::new();
    for i in 0..5 {
        e.push((i, (i + 1) % 5));
        e.push((i, i + 5));
        e.push((i + 5, (i + 2) % 5 + 5));
    }
    build_graph(&e, 10).unwrap()
}

/// Mixed-degree graph with a uniform random potential in `[-a, a]`.
pub fn mixed_instance(n: usize, a: f64, seed: u64) -> (Graph, Potential<f64>) {
    let g = random_degree_bounded(n, 3, 6, seed).unwrap();
    let w = uniform_potential(n, a, seed);
    (g, w)
}

pub fn uniform_potential(n: usize, a: f64, seed: u64) -> Potential<f64> {
    let mut rng = stream_rng(seed, Stream::Potential, 99);
    Potential::from_values((0..n).map(|_| rng.random_range(-a..=a)).collect())
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
