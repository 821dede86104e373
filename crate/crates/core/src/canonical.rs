//! Canonical labeling of decorated graphs.
//!
//! Vertices are colored by local invariants and refined by neighborhood
//! until stable; remaining ties are broken by individualizing each member of
//! the first non-trivial cell in turn. Every discrete coloring yields a
//! layout (vertices in color order, edges relabeled in sorted order) and the
//! least layout is the canonical form. External labels are never permuted.

use std::collections::BTreeMap;
use std::ops::Deref;

use crate::graph::{DecoratedGraph, HalfEdge, Label, Vertex};

/// A graph in canonical layout. Two graphs are isomorphic exactly when their
/// canonical forms are equal, so this is the key type for formal sums.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(DecoratedGraph);

impl CanonicalForm {
    pub fn graph(&self) -> &DecoratedGraph {
        &self.0
    }

    pub fn into_graph(self) -> DecoratedGraph {
        self.0
    }
}

impl Deref for CanonicalForm {
    type Target = DecoratedGraph;

    fn deref(&self) -> &DecoratedGraph {
        &self.0
    }
}

pub fn canonicalize(g: &DecoratedGraph) -> CanonicalForm {
    CanonicalForm(Search::new(g).run().0)
}

pub fn is_isomorphic(a: &DecoratedGraph, b: &DecoratedGraph) -> bool {
    canonicalize(a) == canonicalize(b)
}

/// Order of the group of half-edge permutations that fix every external
/// label and preserve genus, κ, ψ and the edge pairing.
pub fn automorphism_count(g: &DecoratedGraph) -> u64 {
    let (layout, vertex_auts) = Search::new(g).run();
    vertex_auts * edge_symmetry(&layout)
}

/// Symmetries living on the edges of a canonical layout: permutations of
/// identical parallel edges and end-swaps of loops with equal decorations.
fn edge_symmetry(layout: &DecoratedGraph) -> u64 {
    let mut groups: BTreeMap<((usize, u32), (usize, u32)), u64> = BTreeMap::new();
    for (a, b) in layout.edges() {
        let da = (layout.half_edges[a].vertex, layout.half_edges[a].psi);
        let db = (layout.half_edges[b].vertex, layout.half_edges[b].psi);
        *groups.entry((da.min(db), da.max(db))).or_default() += 1;
    }
    groups
        .iter()
        .map(|((da, db), &m)| {
            let fact: u64 = (1..=m).product();
            let flip = if da == db { 1u64 << m } else { 1 };
            fact * flip
        })
        .product()
}

type EdgeEnd = (u32, usize, u32);

struct Search<'a> {
    g: &'a DecoratedGraph,
    /// For each vertex, its edge-ends as (ψ here, neighbor, ψ there).
    ends: Vec<Vec<EdgeEnd>>,
    edges: Vec<(usize, usize)>,
    best: Option<DecoratedGraph>,
    best_count: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a DecoratedGraph) -> Self {
        let edges = g.edges();
        let mut ends = vec![Vec::new(); g.vertices.len()];
        for &(a, b) in &edges {
            let (ha, hb) = (g.half_edges[a], g.half_edges[b]);
            ends[ha.vertex].push((ha.psi, hb.vertex, hb.psi));
            ends[hb.vertex].push((hb.psi, ha.vertex, ha.psi));
        }
        Search { g, ends, edges, best: None, best_count: 0 }
    }

    fn run(mut self) -> (DecoratedGraph, u64) {
        let n = self.g.vertices.len();
        if n == 0 {
            return (DecoratedGraph::default(), 1);
        }
        let initial = self.initial_colors();
        self.descend(initial);
        (self.best.take().expect("at least one leaf"), self.best_count)
    }

    fn initial_colors(&self) -> Vec<usize> {
        type Key<'k> = (u32, &'k [u32], Vec<(u32, u32)>, Vec<(u32, u32, bool)>);
        let keys: Vec<Key> = (0..self.g.vertices.len())
            .map(|v| {
                let vert = &self.g.vertices[v];
                let mut legs: Vec<(u32, u32)> = self
                    .g
                    .half_edges
                    .iter()
                    .filter(|h| h.vertex == v)
                    .filter_map(|h| match h.label {
                        Label::External(l) => Some((l, h.psi)),
                        Label::Internal(_) => None,
                    })
                    .collect();
                legs.sort_unstable();
                let mut ends: Vec<(u32, u32, bool)> =
                    self.ends[v].iter().map(|&(p, w, q)| (p, q, w == v)).collect();
                ends.sort_unstable();
                (vert.genus, vert.kappa.as_slice(), legs, ends)
            })
            .collect();
        rank(&keys)
    }

    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut count = distinct(&colors);
        loop {
            let keys: Vec<(usize, Vec<EdgeEnd>)> = (0..colors.len())
                .map(|v| {
                    let mut nb: Vec<EdgeEnd> =
                        self.ends[v].iter().map(|&(p, w, q)| (p, colors[w], q)).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank(&keys);
            let c = distinct(&next);
            colors = next;
            if c == count {
                return colors;
            }
            count = c;
        }
    }

    fn descend(&mut self, colors: Vec<usize>) {
        let colors = self.refine(colors);
        let n = colors.len();
        if distinct(&colors) == n {
            let layout = self.layout(&colors);
            match &self.best {
                Some(b) if layout > *b => {}
                Some(b) if layout == *b => self.best_count += 1,
                _ => {
                    self.best = Some(layout);
                    self.best_count = 1;
                }
            }
            return;
        }
        // first non-singleton cell in color order
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let cell = (0..n).find(|&c| sizes[c] > 1).expect("non-discrete coloring has a big cell");
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == cell).collect();
        for v in members {
            let keys: Vec<(usize, bool)> = (0..n).map(|u| (colors[u], u != v)).collect();
            self.descend(rank(&keys));
        }
    }

    fn layout(&self, pos: &[usize]) -> DecoratedGraph {
        let g = self.g;
        let mut vertices: Vec<Vertex> = vec![Vertex::bare(0); g.vertices.len()];
        for (v, vert) in g.vertices.iter().enumerate() {
            vertices[pos[v]] = vert.clone();
        }
        let mut edges: Vec<((usize, u32), (usize, u32))> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let da = (pos[g.half_edges[a].vertex], g.half_edges[a].psi);
                let db = (pos[g.half_edges[b].vertex], g.half_edges[b].psi);
                (da.min(db), da.max(db))
            })
            .collect();
        edges.sort_unstable();
        let mut half_edges: Vec<HalfEdge> = Vec::with_capacity(g.half_edges.len());
        for h in &g.half_edges {
            if let Label::External(_) = h.label {
                half_edges.push(HalfEdge { vertex: pos[h.vertex], ..*h });
            }
        }
        for (i, (da, db)) in edges.into_iter().enumerate() {
            let label = Label::Internal(i as u32);
            half_edges.push(HalfEdge { vertex: da.0, label, psi: da.1 });
            half_edges.push(HalfEdge { vertex: db.0, label, psi: db.1 });
        }
        half_edges.sort_unstable();
        DecoratedGraph { vertices, half_edges }
    }
}

fn rank<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(&k).expect("key present")).collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;

    fn example() -> DecoratedGraph {
        let mut g = DecoratedGraph::default();
        let a = g.add_vertex(Vertex::bare(0));
        let b = g.add_vertex(Vertex::bare(0));
        let c = g.add_vertex(Vertex::bare(1));
        for (v, l) in [(a, 1), (a, 2), (b, 3), (b, 4)] {
            g.add_leg(v, l, 0);
        }
        g.add_edge(a, 0, c, 0);
        g.add_edge(b, 0, c, 0);
        g
    }

    #[test]
    fn internal_relabeling_is_invisible() {
        let g = example();
        let mut h = g.clone();
        for he in &mut h.half_edges {
            if let Label::Internal(i) = he.label {
                he.label = Label::Internal(1 - i);
            }
        }
        assert_eq!(canonicalize(&g), canonicalize(&h));
    }

    #[test]
    fn external_labels_are_fixed() {
        let g = example();
        assert_ne!(canonicalize(&g), canonicalize(&g.transpose(1, 3)));
        // swapping 1 and 2 is a genuine symmetry
        assert_eq!(canonicalize(&g), canonicalize(&g.transpose(1, 2)));
    }

    #[test]
    fn vertex_order_is_invisible() {
        let g = example();
        let perm = [2usize, 0, 1];
        let mut h = g.clone();
        h.vertices = vec![g.vertices[1].clone(), g.vertices[2].clone(), g.vertices[0].clone()];
        for he in &mut h.half_edges {
            he.vertex = perm[he.vertex];
        }
        h.half_edges.reverse();
        assert_eq!(canonicalize(&g), canonicalize(&h));
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let c = canonicalize(&example());
        assert_eq!(canonicalize(c.graph()), c);
    }

    #[test]
    fn loop_has_two_automorphisms() {
        let mut g = DecoratedGraph::single_vertex(0, [1]);
        g.add_edge(0, 0, 0, 0);
        assert_eq!(automorphism_count(&g), 2);
        g.half_edges[1].psi = 1;
        assert_eq!(automorphism_count(&g), 1);
    }

    #[test]
    fn example_has_trivial_automorphisms() {
        assert_eq!(automorphism_count(&example()), 1);
    }

    #[test]
    fn banana_graph() {
        // two genus-0 vertices joined by three edges: S3 on edges × swap of vertices
        let mut g = DecoratedGraph::default();
        let a = g.add_vertex(Vertex::bare(0));
        let b = g.add_vertex(Vertex::bare(0));
        for _ in 0..3 {
            g.add_edge(a, 0, b, 0);
        }
        assert_eq!(automorphism_count(&g), 12);
    }
}
