//! WDVV relations placed at genus-0 vertices of a host graph.

use itertools::Itertools;
use num_traits::One;

use crate::formal_sum::FormalSum;
use crate::graph::DecoratedGraph;
use crate::relations::rewrite::kappa_splits;
use crate::strata::split_with_edge;
use crate::Rational;

/// The boundary expression P(ab|cd) at vertex `w`: the sum of all splittings
/// of `w` with a, b on one side and c, d on the other.
pub fn four_point_divisor(host: &DecoratedGraph, w: usize, quad: [usize; 4]) -> FormalSum {
    let [a, b, c, d] = quad;
    let rest: Vec<usize> = host.half_edges_at(w).into_iter().filter(|h| ![a, b, c, d].contains(h)).collect();
    let kappa = host.vertices[w].kappa.clone();
    let mut out = FormalSum::new();
    for mask in 0u64..(1 << rest.len()) {
        let mut first = vec![a, b];
        first.extend((0..rest.len()).filter(|i| mask >> i & 1 == 1).map(|i| rest[i]));
        debug_assert!(!first.contains(&c) && !first.contains(&d));
        for (ka, kb) in kappa_splits(&kappa) {
            let (t, _, _) = split_with_edge(host, w, &first, (0, 0), (ka, kb));
            out.add_term(&t, Rational::one());
        }
    }
    out
}

/// For each four half-edges {a,b,c,d} at the genus-0 vertex `w`, the two
/// relations P(ab|cd) − P(ac|bd) and P(ab|cd) − P(ad|bc).
pub fn wdvv_relations(host: &DecoratedGraph, w: usize) -> Vec<FormalSum> {
    let hs = host.half_edges_at(w);
    if host.vertices[w].genus != 0 || hs.len() < 4 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for q in hs.iter().copied().combinations(4) {
        let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
        let p_ab = four_point_divisor(host, w, [a, b, c, d]);
        let p_ac = four_point_divisor(host, w, [a, c, b, d]);
        let p_ad = four_point_divisor(host, w, [a, d, b, c]);
        out.push(&p_ab - &p_ac);
        out.push(&p_ab - &p_ad);
    }
    out
}

/// WDVV relations at every genus-0 vertex of valence ≥ 4.
pub fn all_wdvv_relations(host: &DecoratedGraph) -> Vec<FormalSum> {
    (0..host.num_vertices()).flat_map(|w| wdvv_relations(host, w)).collect()
}
