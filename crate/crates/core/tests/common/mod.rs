//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taut_core::gwi::parse_graph;
use taut_core::{symmetrize, DecoratedGraph, FormalSum, Vertex};

pub const STRATA: &str = include_str!("../../data/m14_codim2_strata.gwi");

/// The nine codimension-two boundary strata of M̄_{1,4}, in the c1..c9 order.
pub fn listed_strata() -> Vec<DecoratedGraph> {
    STRATA
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_graph(l).unwrap())
        .collect()
}

pub fn orbit_classes() -> Vec<FormalSum> {
    listed_strata().iter().map(|g| symmetrize(g, &[1, 2, 3, 4]).unwrap()).collect()
}

/// A random connected graph with decorations, not necessarily stable.
pub fn random_shape(rng: &mut ChaCha8Rng, max_genus: u32) -> DecoratedGraph {
    let mut g = DecoratedGraph::default();
    let nv = rng.gen_range(1..=3);
    for _ in 0..nv {
        g.add_vertex(Vertex::bare(rng.gen_range(0..=max_genus)));
    }
    for v in 1..nv {
        let u = rng.gen_range(0..v);
        g.add_edge(u, 0, v, 0);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let (a, b) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
        g.add_edge(a, 0, b, 0);
    }
    for label in 1..=rng.gen_range(0..=5u32) {
        let v = rng.gen_range(0..nv);
        g.add_leg(v, label, 0);
    }
    for h in 0..g.half_edges.len() {
        if rng.gen_bool(0.2) {
            g.half_edges[h].psi = rng.gen_range(1..=2);
        }
    }
    for v in 0..nv {
        if rng.gen_bool(0.15) {
            g.vertices[v].kappa = if rng.gen_bool(0.5) { vec![1] } else { vec![2] };
        }
    }
    g
}

/// A random connected, stable decorated graph with at most `max_half_edges`
/// half-edges and total genus at most `max_genus`.
pub fn random_graph(rng: &mut ChaCha8Rng, max_half_edges: usize, max_genus: u32) -> DecoratedGraph {
    loop {
        let g = random_shape(rng, max_genus);
        if g.half_edges.len() <= max_half_edges && g.total_genus() <= max_genus as i64 && g.is_valid() {
            return g;
        }
    }
}

pub fn seeded_graph(seed: u64, max_half_edges: usize, max_genus: u32) -> DecoratedGraph {
    random_graph(&mut ChaCha8Rng::seed_from_u64(seed), max_half_edges, max_genus)
}

/// An isomorphic copy of `g` with vertices, half-edges and edge names
/// shuffled.
pub fn shuffled(g: &DecoratedGraph, seed: u64) -> DecoratedGraph {
    use rand::seq::SliceRandom;
    use taut_core::{HalfEdge, Label};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vperm: Vec<usize> = (0..g.vertices.len()).collect();
    vperm.shuffle(&mut rng);
    let mut vertices = vec![Vertex::bare(0); g.vertices.len()];
    for (old, &new) in vperm.iter().enumerate() {
        vertices[new] = g.vertices[old].clone();
    }
    let offset = rng.gen_range(1..50);
    let mut half_edges: Vec<HalfEdge> = g
        .half_edges
        .iter()
        .map(|h| HalfEdge {
            vertex: vperm[h.vertex],
            label: match h.label {
                Label::Internal(i) => Label::Internal(3 * i + offset),
                l => l,
            },
            psi: h.psi,
        })
        .collect();
    half_edges.shuffle(&mut rng);
    DecoratedGraph::new(vertices, half_edges)
}

pub fn corpus(size: usize, seed: u64) -> Vec<DecoratedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| random_graph(&mut rng, 8, 2)).collect()
}
