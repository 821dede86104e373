//! Rewriting ψ and κ decorations into undecorated boundary strata.
//!
//! * genus 0: ψ_h = Σ δ_S over S ∋ h avoiding two reference points;
//! * genus 1: ψ_h = (1/24)·(irreducible node) + Σ_{S ∋ h, |S| ≥ 2} δ_{0,S};
//! * κ (Arbarello–Cornalba): κ_a Π κ_b = π_*(ψ_x^{a+1} Π (κ_b − ψ_x^b)), where
//!   x is a temporary marking forgotten by π.
//!
//! Higher powers ψ_h^a keep ψ_h^{a−1} on h; κ factors at the rewritten vertex
//! are distributed over the new vertices. Decorations at vertices of genus
//! ≥ 2 are not handled and raise [`TautError::InductiveDataMissing`].

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;

use crate::canonical::{canonicalize, CanonicalForm};
use crate::error::{Result, TautError};
use crate::formal_sum::FormalSum;
use crate::graph::DecoratedGraph;
use crate::strata::split_with_edge;
use crate::{rat, Rational};

/// Every vertex has nonnegative local dimension; otherwise the class is zero.
pub fn locally_nonnegative(g: &DecoratedGraph) -> bool {
    (0..g.num_vertices()).all(|v| g.vertex_dimension(v) >= 0)
}

/// All labeled ways to share a κ-monomial between two vertices.
pub(crate) fn kappa_splits(kappa: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    (0u64..(1 << kappa.len()))
        .map(|mask| {
            let a = (0..kappa.len()).filter(|b| mask >> b & 1 == 1).map(|b| kappa[b]).collect();
            let b = (0..kappa.len()).filter(|b| mask >> b & 1 == 0).map(|b| kappa[b]).collect();
            (a, b)
        })
        .collect()
}

fn push_nonnegative(out: &mut FormalSum, g: &DecoratedGraph, c: Rational) {
    if locally_nonnegative(g) {
        out.add_term(g, c);
    }
}

/// Genus-0 TRR for the ψ at half-edge `h`. The reference points are the
/// first two other half-edges at the vertex, in the graph's order.
pub fn trr0_at(g: &DecoratedGraph, h: usize) -> FormalSum {
    let v = g.half_edges[h].vertex;
    debug_assert_eq!(g.vertices[v].genus, 0);
    let hs = g.half_edges_at(v);
    let mut out = FormalSum::new();
    if hs.len() < 4 {
        return out;
    }
    let others: Vec<usize> = hs.iter().copied().filter(|&x| x != h).collect();
    let free = &others[2..];
    let mut base = g.clone();
    base.half_edges[h].psi -= 1;
    let kappa = g.vertices[v].kappa.clone();
    for mask in 1u64..(1 << free.len()) {
        let mut first = vec![h];
        first.extend((0..free.len()).filter(|b| mask >> b & 1 == 1).map(|b| free[b]));
        for (ka, kb) in kappa_splits(&kappa) {
            let (t, _, _) = split_with_edge(&base, v, &first, (0, 0), (ka, kb));
            push_nonnegative(&mut out, &t, Rational::one());
        }
    }
    out
}

/// Genus-1 rewrite of the ψ at half-edge `h`.
pub fn trr1_at(g: &DecoratedGraph, h: usize) -> FormalSum {
    let v = g.half_edges[h].vertex;
    debug_assert_eq!(g.vertices[v].genus, 1);
    let hs = g.half_edges_at(v);
    let mut base = g.clone();
    base.half_edges[h].psi -= 1;
    let mut out = FormalSum::new();

    let mut looped = base.clone();
    looped.vertices[v].genus = 0;
    looped.add_edge(v, 0, v, 0);
    push_nonnegative(&mut out, &looped, rat(1, 24));

    let others: Vec<usize> = hs.iter().copied().filter(|&x| x != h).collect();
    let kappa = g.vertices[v].kappa.clone();
    for mask in 1u64..(1 << others.len()) {
        let mut first = vec![h];
        first.extend((0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]));
        for (ka, kb) in kappa_splits(&kappa) {
            let (t, _, _) = split_with_edge(&base, v, &first, (0, 1), (ka, kb));
            push_nonnegative(&mut out, &t, Rational::one());
        }
    }
    out
}

fn first_psi(g: &DecoratedGraph, genus: u32) -> Option<usize> {
    (0..g.half_edges.len()).find(|&h| g.half_edges[h].psi > 0 && g.vertices[g.half_edges[h].vertex].genus == genus)
}

/// Rewrites until no genus-`genus` vertex carries a ψ.
fn exhaust(e: &FormalSum, genus: u32, step: fn(&DecoratedGraph, usize) -> FormalSum) -> FormalSum {
    let mut done = FormalSum::new();
    let mut todo = e.clone();
    while !todo.is_zero() {
        let mut next = FormalSum::new();
        for (k, c) in todo.iter() {
            match first_psi(k, genus) {
                None => done.add_canonical(k.clone(), c.clone()),
                Some(h) => next.add_scaled(&step(k, h), c),
            }
        }
        todo = next;
    }
    done
}

/// Removes every ψ on genus-0 vertices.
pub fn genus0_trr_rewrite(e: &FormalSum) -> FormalSum {
    exhaust(e, 0, trr0_at)
}

/// Removes every ψ on genus-1 vertices, then cleans up genus-0 descendants.
pub fn genus1_trr_rewrite(e: &FormalSum) -> FormalSum {
    genus0_trr_rewrite(&exhaust(e, 1, trr1_at))
}

fn reduce_cache() -> &'static Mutex<HashMap<CanonicalForm, FormalSum>> {
    static CACHE: OnceLock<Mutex<HashMap<CanonicalForm, FormalSum>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The ambient (g, n, k) of the moduli factor at vertex `v`.
fn vertex_ambient(g: &DecoratedGraph, v: usize) -> TautError {
    let vert = &g.vertices[v];
    let n = g.valence(v);
    let k = (3 * vert.genus as i64 - 3 + n as i64) - g.vertex_dimension(v);
    TautError::InductiveDataMissing { g: vert.genus as i64, n, k }
}

/// Forgets the leg `x` of an undecorated graph. Only a trivalent genus-0
/// vertex can carry it without the image dropping dimension; that vertex is
/// contracted. Everything else pushes forward to zero.
fn forget_leg(g: &DecoratedGraph, x: u32) -> Option<DecoratedGraph> {
    let hx = g.leg(x)?;
    let w = g.half_edges[hx].vertex;
    if g.vertices[w].genus != 0 || g.valence(w) != 3 {
        return None;
    }
    let partners = g.partners();
    let rest: Vec<usize> = g.half_edges_at(w).into_iter().filter(|&h| h != hx).collect();
    let (p, q) = (rest[0], rest[1]);
    if partners[p] == Some(q) {
        return None;
    }
    let mut t = g.clone();
    match (partners[p], partners[q]) {
        (Some(pp), Some(qq)) => {
            let label = t.half_edges[pp].label;
            t.half_edges[qq].label = label;
        }
        (None, Some(qq)) => t.half_edges[qq].label = g.half_edges[p].label,
        (Some(pp), None) => t.half_edges[pp].label = g.half_edges[q].label,
        (None, None) => return None,
    }
    t.half_edges = t.half_edges.iter().enumerate().filter(|(h, _)| *h != hx && *h != p && *h != q).map(|(_, he)| *he).collect();
    let dead = std::collections::BTreeSet::from([w]);
    Some(t.remove_vertices(&dead))
}

fn kappa_pushforward(g: &DecoratedGraph, v: usize) -> Result<FormalSum> {
    let kappa = g.vertices[v].kappa.clone();
    let a = kappa[0];
    let bs = &kappa[1..];
    let x = g.max_external() + 1;
    let mut out = FormalSum::new();
    for mask in 0u64..(1 << bs.len()) {
        let kept: Vec<u32> = (0..bs.len()).filter(|b| mask >> b & 1 == 1).map(|b| bs[b]).collect();
        let moved: u32 = (0..bs.len()).filter(|b| mask >> b & 1 == 0).map(|b| bs[b]).sum();
        let dropped = bs.len() - kept.len();
        let sign = if dropped.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
        let mut t = g.clone();
        t.vertices[v].kappa = kept;
        t.add_leg(v, x, a + 1 + moved);
        for (k, c) in reduce(&canonicalize(&t))?.iter() {
            if let Some(f) = forget_leg(k, x) {
                out.add_term(&f, &sign * c);
            }
        }
    }
    Ok(out)
}

fn reduce_step(g: &CanonicalForm) -> Result<FormalSum> {
    if let Some(h) = (0..g.half_edges.len()).find(|&h| g.half_edges[h].psi > 0) {
        let v = g.half_edges[h].vertex;
        return match g.vertices[v].genus {
            0 => Ok(trr0_at(g, h)),
            1 => Ok(trr1_at(g, h)),
            _ => Err(vertex_ambient(g, v)),
        };
    }
    let v = (0..g.num_vertices()).find(|&v| !g.vertices[v].kappa.is_empty()).expect("decorated graph");
    if g.vertices[v].genus >= 2 {
        return Err(vertex_ambient(g, v));
    }
    kappa_pushforward(g, v)
}

/// Rewrites one graph into a combination of undecorated strata.
pub fn reduce(g: &CanonicalForm) -> Result<FormalSum> {
    if !locally_nonnegative(g) {
        return Ok(FormalSum::new());
    }
    if !g.is_decorated() {
        return Ok(FormalSum::from_graph(g));
    }
    if let Some(hit) = reduce_cache().lock().unwrap().get(g) {
        return Ok(hit.clone());
    }
    let step = reduce_step(g)?;
    let out = step.try_map_linear(reduce)?;
    reduce_cache().lock().unwrap().insert(g.clone(), out.clone());
    Ok(out)
}

/// [`reduce`] extended linearly.
pub fn reduce_sum(e: &FormalSum) -> Result<FormalSum> {
    e.try_map_linear(reduce)
}
