//! Enumeration of stable graphs and of their decorations.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::canonical::{canonicalize, CanonicalForm};
use crate::graph::{DecoratedGraph, Vertex};

/// Which decorations a class may carry besides its graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Decorations {
    None,
    Psi,
    PsiKappa,
}

type StrataKey = (u32, Vec<u32>, usize);

fn strata_cache() -> &'static Mutex<HashMap<StrataKey, Arc<Vec<CanonicalForm>>>> {
    static CACHE: OnceLock<Mutex<HashMap<StrataKey, Arc<Vec<CanonicalForm>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Splits vertex `v` into `v` (keeping the half-edges in `first`) and a new
/// vertex holding the rest, joined by a new edge. Returns the graph and the
/// two new half-edge indices (on `v`, on the new vertex).
pub fn split_with_edge(
    g: &DecoratedGraph,
    v: usize,
    first: &[usize],
    genus: (u32, u32),
    kappa: (Vec<u32>, Vec<u32>),
) -> (DecoratedGraph, usize, usize) {
    let mut t = g.clone();
    t.vertices[v] = Vertex::new(genus.0, kappa.0);
    let u = t.add_vertex(Vertex::new(genus.1, kappa.1));
    for h in t.half_edges_at(v) {
        if !first.contains(&h) {
            t.half_edges[h].vertex = u;
        }
    }
    let (a, b) = t.add_edge(v, 0, u, 0);
    (t, a, b)
}

/// All graphs obtained from `g` by one degeneration: a new loop at a vertex
/// of positive genus, or a vertex split into two joined by an edge.
pub fn degenerations(g: &DecoratedGraph) -> BTreeSet<CanonicalForm> {
    let mut out = BTreeSet::new();
    for v in 0..g.num_vertices() {
        let genus = g.vertices[v].genus;
        if genus > 0 {
            let mut t = g.clone();
            t.vertices[v].genus -= 1;
            t.add_edge(v, 0, v, 0);
            out.insert(canonicalize(&t));
        }
        let hs = g.half_edges_at(v);
        for mask in 0u64..(1 << hs.len()) {
            let first: Vec<usize> = (0..hs.len()).filter(|b| mask >> b & 1 == 1).map(|b| hs[b]).collect();
            let n1 = first.len() as i64 + 1;
            let n2 = hs.len() as i64 - first.len() as i64 + 1;
            for g1 in 0..=genus {
                let g2 = genus - g1;
                if 2 * g1 as i64 - 2 + n1 <= 0 || 2 * g2 as i64 - 2 + n2 <= 0 {
                    continue;
                }
                let (t, _, _) = split_with_edge(g, v, &first, (g1, g2), (Vec::new(), Vec::new()));
                out.insert(canonicalize(&t));
            }
        }
    }
    out
}

/// Connected undecorated stable graphs of genus `genus` with the given legs
/// and exactly `edges` edges, in canonical order.
pub fn undecorated_strata(genus: u32, legs: &[u32], edges: usize) -> Arc<Vec<CanonicalForm>> {
    let mut legs = legs.to_vec();
    legs.sort_unstable();
    let key = (genus, legs.clone(), edges);
    if let Some(hit) = strata_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let result: Vec<CanonicalForm> = if edges == 0 {
        let g = DecoratedGraph::single_vertex(genus, legs.iter().copied());
        if g.vertex_is_stable(0) {
            vec![canonicalize(&g)]
        } else {
            Vec::new()
        }
    } else {
        let prev = undecorated_strata(genus, &legs, edges - 1);
        let mut set = BTreeSet::new();
        for g in prev.iter() {
            set.extend(degenerations(g));
        }
        set.into_iter().collect()
    };
    let result = Arc::new(result);
    strata_cache().lock().unwrap().insert(key, result.clone());
    result
}

/// Integer partitions of `n` into parts ≥ 1, each sorted increasingly.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in min..=n {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out
}

/// Compositions of `total` into `slots` nonnegative parts.
fn compositions(total: u32, slots: usize) -> Vec<Vec<u32>> {
    if slots == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, slots - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The local decorations of degree exactly `d` at vertex `v`: ψ-powers on
/// its half-edges and a κ-monomial.
fn local_decorations(g: &DecoratedGraph, v: usize, d: u32, kind: Decorations) -> Vec<(Vec<u32>, Vec<u32>)> {
    let hs = g.half_edges_at(v).len();
    let mut out = Vec::new();
    let kappa_max = if kind == Decorations::PsiKappa { d } else { 0 };
    for kdeg in 0..=kappa_max {
        let kappas = if kdeg == 0 { vec![Vec::new()] } else { partitions(kdeg) };
        for psi in compositions(d - kdeg, hs) {
            for k in &kappas {
                out.push((psi.clone(), k.clone()));
            }
        }
    }
    out
}

/// All decorations of the undecorated graph `g` with total degree `d` and
/// every vertex of nonnegative local dimension.
pub fn decorate(g: &DecoratedGraph, d: u32, kind: Decorations) -> Vec<DecoratedGraph> {
    if kind == Decorations::None {
        return if d == 0 { vec![g.clone()] } else { Vec::new() };
    }
    let n = g.num_vertices();
    let caps: Vec<u32> = (0..n).map(|v| g.vertex_dimension(v).max(0) as u32).collect();
    let mut out = Vec::new();
    for split in compositions(d, n) {
        if split.iter().zip(&caps).any(|(a, c)| a > c) {
            continue;
        }
        let mut partial = vec![g.clone()];
        for v in 0..n {
            let choices = local_decorations(g, v, split[v], kind);
            let hs = g.half_edges_at(v);
            let mut next = Vec::with_capacity(partial.len() * choices.len());
            for base in &partial {
                for (psi, kappa) in &choices {
                    let mut t = base.clone();
                    for (h, p) in hs.iter().zip(psi) {
                        t.half_edges[*h].psi = *p;
                    }
                    t.vertices[v].kappa = kappa.clone();
                    next.push(t);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// Decorated classes of codimension `codim` on M̄_{genus,legs}.
pub fn decorated_classes(genus: u32, legs: &[u32], codim: usize, kind: Decorations) -> Vec<CanonicalForm> {
    let mut set = BTreeSet::new();
    let lowest = if kind == Decorations::None { codim } else { 0 };
    for e in lowest..=codim {
        for s in undecorated_strata(genus, legs, e).iter() {
            for t in decorate(s, (codim - e) as u32, kind) {
                set.insert(canonicalize(&t));
            }
        }
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_zero_boundary_counts() {
        assert_eq!(undecorated_strata(0, &[1, 2, 3, 4], 1).len(), 3);
        assert_eq!(undecorated_strata(0, &[1, 2, 3, 4, 5], 1).len(), 10);
        // trivalent trees with 5 leaves
        assert_eq!(undecorated_strata(0, &[1, 2, 3, 4, 5], 2).len(), 15);
        assert!(undecorated_strata(0, &[1, 2, 3], 1).is_empty());
    }

    #[test]
    fn genus_one_divisors() {
        // the irreducible divisor and one δ_{0,S} per subset of size ≥ 2
        assert_eq!(undecorated_strata(1, &[1, 2, 3], 1).len(), 1 + 4);
        assert_eq!(undecorated_strata(1, &[1], 1).len(), 1);
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn decorated_m11() {
        // ψ₁, κ₁ and the nodal curve
        assert_eq!(decorated_classes(1, &[1], 1, Decorations::PsiKappa).len(), 3);
        assert_eq!(decorated_classes(1, &[1], 1, Decorations::Psi).len(), 2);
    }
}
