//! Relations induced from known ones by gluing two points, by pulling back
//! along a forgetful map, or by inserting a relation at a vertex of a host.

use num_traits::One;

use crate::error::{Result, TautError};
use crate::formal_sum::FormalSum;
use crate::graph::{DecoratedGraph, HalfEdge, Label, Vertex};
use crate::operators::common_ambient;
use crate::relations::rewrite::kappa_splits;
use crate::Rational;

/// Joins legs `a` and `b` into an edge in every term.
pub fn induce_by_gluing(rel: &FormalSum, a: u32, b: u32) -> Result<FormalSum> {
    if a == b {
        return Err(TautError::LabelCollision(a));
    }
    rel.try_map_linear(|k| {
        let ha = k.leg(a).ok_or(TautError::UnknownLabel(a))?;
        let hb = k.leg(b).ok_or(TautError::UnknownLabel(b))?;
        let mut t = k.graph().clone();
        let label = Label::Internal(t.fresh_internal());
        t.half_edges[ha].label = label;
        t.half_edges[hb].label = label;
        Ok(FormalSum::from_graph(&t))
    })
}

/// Pullback of one decorated graph along the map forgetting the new leg `x`.
///
/// The leg is placed on each vertex in turn. At that vertex ψ_h^a pulls back
/// to ψ_h^a − D_{h,x}·ψ^{a−1} (the node replaces h on the vertex) and κ_b to
/// κ_b − ψ_x^b.
pub fn pullback_forgetful(g: &DecoratedGraph, x: u32) -> FormalSum {
    let mut out = FormalSum::new();
    for v in 0..g.num_vertices() {
        let kappa = g.vertices[v].kappa.clone();
        for (kept, moved) in kappa_splits(&kappa) {
            let sign = if moved.len() % 2 == 0 { Rational::one() } else { -Rational::one() };
            let mut t = g.clone();
            t.vertices[v].kappa = kept;
            t.add_leg(v, x, moved.iter().sum());
            out.add_term(&t, sign);
        }
        for h in g.half_edges_at(v) {
            let a = g.half_edges[h].psi;
            if a == 0 {
                continue;
            }
            let mut t = g.clone();
            let u = t.add_vertex(Vertex::bare(0));
            t.half_edges[h].vertex = u;
            t.half_edges[h].psi = 0;
            t.add_leg(u, x, 0);
            t.add_edge(v, a - 1, u, 0);
            out.add_term(&t, -Rational::one());
        }
    }
    out
}

/// Pullback of a relation along the map forgetting one new point, labeled
/// one past the largest marking.
pub fn induce_by_forgetful(rel: &FormalSum) -> Result<FormalSum> {
    let Some(amb) = common_ambient(rel.iter().map(|(k, _)| k.graph()))? else {
        return Ok(FormalSum::new());
    };
    let x = amb.new_labels().0;
    Ok(rel.map_linear(|k| pullback_forgetful(k, x)))
}

/// Replaces vertex `w` of `host` by the graph `piece`. Leg `λ` of the piece
/// takes over the host half-edge `assign[λ]` (its label and its ψ-power,
/// added to the piece's). Legs of the piece without an assignment are kept.
pub fn substitute(
    host: &DecoratedGraph,
    w: usize,
    piece: &DecoratedGraph,
    assign: &std::collections::BTreeMap<u32, usize>,
) -> DecoratedGraph {
    let mut out = DecoratedGraph::default();
    let mut index = vec![usize::MAX; host.num_vertices()];
    for v in 0..host.num_vertices() {
        if v != w {
            index[v] = out.add_vertex(host.vertices[v].clone());
        }
    }
    for h in &host.half_edges {
        if h.vertex != w {
            out.half_edges.push(HalfEdge { vertex: index[h.vertex], ..*h });
        }
    }
    let base = out.num_vertices();
    out.vertices.extend(piece.vertices.iter().cloned());
    let shift = host.fresh_internal();
    for h in &piece.half_edges {
        let vertex = base + h.vertex;
        match h.label {
            Label::Internal(i) => {
                out.half_edges.push(HalfEdge { vertex, label: Label::Internal(i + shift), psi: h.psi })
            }
            Label::External(l) => match assign.get(&l) {
                Some(&hh) => {
                    let src = host.half_edges[hh];
                    out.half_edges.push(HalfEdge { vertex, label: src.label, psi: h.psi + src.psi });
                }
                None => out.half_edges.push(*h),
            },
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwi::{parse_graph, parse_sum};
    use std::collections::BTreeMap;

    #[test]
    fn gluing_m04_relation() {
        let rel = parse_sum("<1 2 e0>_0 <3 4 e0>_0 - <1 3 e0>_0 <2 4 e0>_0").unwrap();
        let glued = induce_by_gluing(&rel, 1, 2).unwrap();
        for (k, _) in glued.iter() {
            assert!(k.is_valid());
            assert_eq!(k.total_genus(), 1);
        }
        assert!(induce_by_gluing(&rel, 1, 9).is_err());
    }

    #[test]
    fn pullback_of_stratum() {
        let out = induce_by_forgetful(&parse_sum("<1 2 e0>_0 <3 4 e0>_0").unwrap()).unwrap();
        assert_eq!(out, parse_sum("<1 2 5 e0>_0 <3 4 e0>_0 + <1 2 e0>_0 <3 4 5 e0>_0").unwrap());
        assert!(induce_by_forgetful(&FormalSum::new()).unwrap().is_zero());
    }

    #[test]
    fn pullback_of_psi() {
        let out = induce_by_forgetful(&parse_sum("<1^1 2 3 4>_0").unwrap()).unwrap();
        assert_eq!(out, parse_sum("<1^1 2 3 4 5>_0 - <1 5 e0>_0 <2 3 4 e0>_0").unwrap());
    }

    #[test]
    fn substitution_keeps_edges() {
        let host = parse_graph("<1 2 e0>_0 <3 4 e0>_0").unwrap();
        let piece = parse_graph("<1 2 e0>_0 <3 e0 e1 e1>_0").unwrap();
        let assign = BTreeMap::from([(1, 0), (2, 1), (3, 2)]);
        let t = substitute(&host, 0, &piece, &assign);
        assert!(t.is_valid());
        assert_eq!(t.num_edges(), 3);
        assert_eq!(t.total_genus(), 1);
    }
}
