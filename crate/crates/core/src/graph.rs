//! Decorated stable dual graphs.
//!
//! A graph is a list of vertices (genus plus a κ-monomial) and a flat list of
//! half-edges. A half-edge is either a leg carrying an external marking or one
//! end of an edge; the two ends of an edge share an internal label. Loops are
//! ordinary edges whose two ends sit on the same vertex. Graphs may be
//! disconnected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type VertexId = usize;

/// Name of a half-edge. External labels are the marked points, internal
/// labels pair up into edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    External(u32),
    Internal(u32),
}

impl Label {
    pub fn is_external(self) -> bool {
        matches!(self, Label::External(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub genus: u32,
    /// Subscripts of the κ factors, kept sorted. `[1, 1, 2]` is κ₁²κ₂.
    pub kappa: Vec<u32>,
}

impl Vertex {
    pub fn new(genus: u32, mut kappa: Vec<u32>) -> Self {
        kappa.sort_unstable();
        Vertex { genus, kappa }
    }

    pub fn bare(genus: u32) -> Self {
        Vertex { genus, kappa: Vec::new() }
    }

    pub fn kappa_degree(&self) -> u32 {
        self.kappa.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfEdge {
    pub vertex: VertexId,
    pub label: Label,
    /// Power of ψ decorating this half-edge.
    pub psi: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedGraph {
    pub vertices: Vec<Vertex>,
    pub half_edges: Vec<HalfEdge>,
}

/// A broken invariant reported by [`DecoratedGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DanglingHalfEdge { half_edge: usize },
    DuplicateExternal(u32),
    ZeroExternal,
    UnpairedInternal(u32),
    OverusedInternal(u32),
    ZeroKappa { vertex: VertexId },
    Unstable { vertex: VertexId, genus: u32, valence: usize },
    NegativeDimension { component: usize, dimension: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingHalfEdge { half_edge } => {
                write!(f, "half-edge {half_edge} points at a missing vertex")
            }
            Violation::DuplicateExternal(l) => write!(f, "external label {l} used more than once"),
            Violation::ZeroExternal => write!(f, "external labels must be positive"),
            Violation::UnpairedInternal(l) => write!(f, "internal label e{l} occurs only once"),
            Violation::OverusedInternal(l) => write!(f, "internal label e{l} occurs more than twice"),
            Violation::ZeroKappa { vertex } => write!(f, "vertex {vertex} carries κ₀"),
            Violation::Unstable { vertex, genus, valence } => write!(
                f,
                "vertex {vertex} is unstable: 2·{genus}−2+{valence} = {} is not > 0",
                2 * *genus as i64 - 2 + *valence as i64
            ),
            Violation::NegativeDimension { component, dimension } => {
                write!(f, "component {component} has dimension {dimension}")
            }
        }
    }
}

impl DecoratedGraph {
    pub fn new(vertices: Vec<Vertex>, half_edges: Vec<HalfEdge>) -> Self {
        DecoratedGraph { vertices, half_edges }
    }

    /// The open stratum: one vertex of genus `genus` with legs `1..=n`.
    pub fn single_vertex(genus: u32, legs: impl IntoIterator<Item = u32>) -> Self {
        let mut g = DecoratedGraph::default();
        let v = g.add_vertex(Vertex::bare(genus));
        for l in legs {
            g.add_leg(v, l, 0);
        }
        g
    }

    pub fn add_vertex(&mut self, v: Vertex) -> VertexId {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    pub fn add_leg(&mut self, vertex: VertexId, label: u32, psi: u32) -> usize {
        self.half_edges.push(HalfEdge { vertex, label: Label::External(label), psi });
        self.half_edges.len() - 1
    }

    /// Joins two new half-edges into an edge; returns their indices.
    pub fn add_edge(&mut self, a: VertexId, psi_a: u32, b: VertexId, psi_b: u32) -> (usize, usize) {
        let label = Label::Internal(self.fresh_internal());
        self.half_edges.push(HalfEdge { vertex: a, label, psi: psi_a });
        self.half_edges.push(HalfEdge { vertex: b, label, psi: psi_b });
        (self.half_edges.len() - 2, self.half_edges.len() - 1)
    }

    pub fn fresh_internal(&self) -> u32 {
        self.half_edges
            .iter()
            .filter_map(|h| match h.label {
                Label::Internal(i) => Some(i + 1),
                Label::External(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn max_external(&self) -> u32 {
        self.external_labels().into_iter().next_back().unwrap_or(0)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.iter().filter(|h| !h.label.is_external()).count() / 2
    }

    pub fn external_labels(&self) -> BTreeSet<u32> {
        self.half_edges
            .iter()
            .filter_map(|h| match h.label {
                Label::External(l) => Some(l),
                Label::Internal(_) => None,
            })
            .collect()
    }

    /// Index of the half-edge carrying external label `label`.
    pub fn leg(&self, label: u32) -> Option<usize> {
        self.half_edges.iter().position(|h| h.label == Label::External(label))
    }

    pub fn half_edges_at(&self, v: VertexId) -> Vec<usize> {
        (0..self.half_edges.len()).filter(|&h| self.half_edges[h].vertex == v).collect()
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.half_edges.iter().filter(|h| h.vertex == v).count()
    }

    /// For each half-edge, the other end of its edge (legs map to `None`).
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut first: BTreeMap<u32, usize> = BTreeMap::new();
        let mut out = vec![None; self.half_edges.len()];
        for (h, he) in self.half_edges.iter().enumerate() {
            if let Label::Internal(l) = he.label {
                if let Some(o) = first.remove(&l) {
                    out[h] = Some(o);
                    out[o] = Some(h);
                } else {
                    first.insert(l, h);
                }
            }
        }
        out
    }

    /// Edges as pairs of half-edge indices, in order of first appearance.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.partners()
            .iter()
            .enumerate()
            .filter_map(|(h, p)| p.filter(|&o| o > h).map(|o| (h, o)))
            .collect()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b) in self.edges() {
            let ra = find(&mut parent, self.half_edges[a].vertex);
            let rb = find(&mut parent, self.half_edges[b].vertex);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph spanned by `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[VertexId]) -> DecoratedGraph {
        let mut index = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        DecoratedGraph {
            vertices: vertices.iter().map(|&v| self.vertices[v].clone()).collect(),
            half_edges: self
                .half_edges
                .iter()
                .filter(|h| index[h.vertex] != usize::MAX)
                .map(|h| HalfEdge { vertex: index[h.vertex], ..*h })
                .collect(),
        }
    }

    pub fn component_graphs(&self) -> Vec<DecoratedGraph> {
        self.components().iter().map(|c| self.induced(c)).collect()
    }

    /// Disjoint union; internal labels of `other` are shifted to avoid clashes.
    pub fn disjoint_union(&self, other: &DecoratedGraph) -> DecoratedGraph {
        let shift = self.fresh_internal();
        let base = self.vertices.len();
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().cloned());
        out.half_edges.extend(other.half_edges.iter().map(|h| HalfEdge {
            vertex: h.vertex + base,
            label: match h.label {
                Label::Internal(i) => Label::Internal(i + shift),
                e => e,
            },
            psi: h.psi,
        }));
        out
    }

    /// Arithmetic genus Σ g(Cᵢ) − d + 1, where each component contributes its
    /// vertex genera plus its cycle rank.
    pub fn total_genus(&self) -> i64 {
        let gsum: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        gsum + self.num_edges() as i64 - self.vertices.len() as i64 + 1
    }

    /// Genus of a single connected component given by its vertices.
    pub fn component_genus(&self, comp: &[VertexId]) -> i64 {
        let sub = self.induced(comp);
        sub.total_genus()
    }

    pub fn psi_degree(&self) -> u32 {
        self.half_edges.iter().map(|h| h.psi).sum()
    }

    pub fn kappa_degree(&self) -> u32 {
        self.vertices.iter().map(Vertex::kappa_degree).sum()
    }

    pub fn is_decorated(&self) -> bool {
        self.psi_degree() > 0 || self.kappa_degree() > 0
    }

    /// Dimension of the moduli factor at `v` minus the decorations placed there.
    pub fn vertex_dimension(&self, v: VertexId) -> i64 {
        let val = self.valence(v) as i64;
        let deg: i64 = self
            .half_edges
            .iter()
            .filter(|h| h.vertex == v)
            .map(|h| h.psi as i64)
            .sum::<i64>()
            + self.vertices[v].kappa_degree() as i64;
        3 * self.vertices[v].genus as i64 - 3 + val - deg
    }

    /// Σ_v (3g_v − 3 + val v) − total ψ-degree − total κ-degree.
    pub fn dimension(&self) -> i64 {
        (0..self.vertices.len()).map(|v| self.vertex_dimension(v)).sum()
    }

    pub fn vertex_is_stable(&self, v: VertexId) -> bool {
        2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut seen_ext = BTreeSet::new();
        let mut internal: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, h) in self.half_edges.iter().enumerate() {
            if h.vertex >= self.vertices.len() {
                out.push(Violation::DanglingHalfEdge { half_edge: i });
            }
            match h.label {
                Label::External(0) => out.push(Violation::ZeroExternal),
                Label::External(l) => {
                    if !seen_ext.insert(l) {
                        out.push(Violation::DuplicateExternal(l));
                    }
                }
                Label::Internal(l) => *internal.entry(l).or_default() += 1,
            }
        }
        for (l, c) in internal {
            if c == 1 {
                out.push(Violation::UnpairedInternal(l));
            } else if c > 2 {
                out.push(Violation::OverusedInternal(l));
            }
        }
        if !out.is_empty() {
            return Err(out);
        }
        for (v, vert) in self.vertices.iter().enumerate() {
            if vert.kappa.contains(&0) {
                out.push(Violation::ZeroKappa { vertex: v });
            }
            if !self.vertex_is_stable(v) {
                out.push(Violation::Unstable { vertex: v, genus: vert.genus, valence: self.valence(v) });
            }
        }
        for (i, comp) in self.components().iter().enumerate() {
            let d: i64 = comp.iter().map(|&v| self.vertex_dimension(v)).sum();
            if d < 0 {
                out.push(Violation::NegativeDimension { component: i, dimension: d });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Renames external labels through `map`; labels not in the map are kept.
    pub fn relabel_external(&self, map: &BTreeMap<u32, u32>) -> DecoratedGraph {
        let mut out = self.clone();
        for h in &mut out.half_edges {
            if let Label::External(l) = h.label {
                if let Some(&m) = map.get(&l) {
                    h.label = Label::External(m);
                }
            }
        }
        out
    }

    /// Swaps two external labels.
    pub fn transpose(&self, a: u32, b: u32) -> DecoratedGraph {
        let map = BTreeMap::from([(a, b), (b, a)]);
        self.relabel_external(&map)
    }

    /// Removes vertices listed in `dead` together with their half-edges and
    /// renumbers the rest.
    pub fn remove_vertices(&self, dead: &BTreeSet<VertexId>) -> DecoratedGraph {
        let keep: Vec<VertexId> = (0..self.vertices.len()).filter(|v| !dead.contains(v)).collect();
        self.induced(&keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> DecoratedGraph {
        // <1 2 e0>_0 <3 4 e1>_0 <e0 e1>_1
        let mut g = DecoratedGraph::default();
        let a = g.add_vertex(Vertex::bare(0));
        let b = g.add_vertex(Vertex::bare(0));
        let c = g.add_vertex(Vertex::bare(1));
        g.add_leg(a, 1, 0);
        g.add_leg(a, 2, 0);
        g.add_leg(b, 3, 0);
        g.add_leg(b, 4, 0);
        g.add_edge(a, 0, c, 0);
        g.add_edge(b, 0, c, 0);
        g
    }

    #[test]
    fn stability_boundary_case() {
        let g = DecoratedGraph::single_vertex(0, [1, 2]);
        let err = g.validate().unwrap_err();
        assert!(matches!(err[0], Violation::Unstable { vertex: 0, genus: 0, valence: 2 }));
    }

    #[test]
    fn negative_dimension_component() {
        let mut g = DecoratedGraph::single_vertex(0, [1, 2, 3]);
        g.half_edges[2].psi = 1;
        assert_eq!(g.dimension(), -1);
        let err = g.validate().unwrap_err();
        assert_eq!(err, vec![Violation::NegativeDimension { component: 0, dimension: -1 }]);
    }

    #[test]
    fn example_graph_is_valid() {
        let g = example();
        assert!(g.validate().is_ok());
        assert_eq!(g.dimension(), 2);
        assert_eq!(g.total_genus(), 1);
        assert_eq!(4 - g.dimension(), 2);
    }

    #[test]
    fn total_genus_disconnected() {
        let g0 = DecoratedGraph::single_vertex(0, [1, 2, 3]);
        let g1 = DecoratedGraph::single_vertex(1, [4]);
        assert_eq!(g0.disjoint_union(&g1).total_genus(), 0);
        let three = g0
            .disjoint_union(&DecoratedGraph::single_vertex(0, [4, 5, 6]))
            .disjoint_union(&DecoratedGraph::single_vertex(0, [7, 8, 9]));
        assert_eq!(three.total_genus(), -2);
    }

    #[test]
    fn parallel_edges_add_genus() {
        let mut g = DecoratedGraph::default();
        let a = g.add_vertex(Vertex::bare(0));
        let b = g.add_vertex(Vertex::bare(0));
        g.add_leg(a, 1, 0);
        g.add_leg(b, 2, 0);
        g.add_edge(a, 0, b, 0);
        g.add_edge(a, 0, b, 0);
        assert_eq!(g.total_genus(), 1);
        assert!(g.is_valid());
    }

    #[test]
    fn open_stratum_dimension() {
        for (genus, n) in [(0u32, 3u32), (1, 1), (2, 0), (1, 4), (3, 2)] {
            let g = DecoratedGraph::single_vertex(genus, 1..=n);
            assert_eq!(g.dimension(), 3 * genus as i64 - 3 + n as i64);
        }
    }

    #[test]
    fn bad_labels_are_reported() {
        let mut g = DecoratedGraph::single_vertex(0, [1, 1, 2]);
        g.half_edges.push(HalfEdge { vertex: 0, label: Label::Internal(4), psi: 0 });
        let err = g.validate().unwrap_err();
        assert!(err.contains(&Violation::DuplicateExternal(1)));
        assert!(err.contains(&Violation::UnpairedInternal(4)));
    }

    #[test]
    fn components_split() {
        let g = DecoratedGraph::single_vertex(0, [1, 2, 3])
            .disjoint_union(&DecoratedGraph::single_vertex(1, [4]));
        let comps = g.component_graphs();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].external_labels(), BTreeSet::from([4]));
    }
}
