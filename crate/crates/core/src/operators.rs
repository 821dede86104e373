//! The invariance operators 𝔯_l.
//!
//! 𝔯_l sends a decorated graph on M̄•_{g,n} to a combination of graphs on
//! M̄•_{g−1,n+2}: it is the sum of three expansions that each create two new
//! legs `i` and `j` and lower the dimension by exactly `l`. Output terms that
//! are unstable or have a component of negative dimension are dropped.

use std::collections::BTreeSet;

use num_traits::One;

use crate::error::{Result, TautError};
use crate::formal_sum::{FormalSum, SymbolicSum};
use crate::graph::{DecoratedGraph, Label, Vertex};
use crate::{rat, Rational};

fn check_labels(g: &DecoratedGraph, i: u32, j: u32) -> Result<()> {
    if i == 0 {
        return Err(TautError::LabelCollision(0));
    }
    if i == j {
        return Err(TautError::LabelCollision(i));
    }
    for l in [i, j] {
        if g.leg(l).is_some() {
            return Err(TautError::LabelCollision(l));
        }
    }
    Ok(())
}

/// ½(−1)^{m+1}
fn half_sign(m: u32) -> Rational {
    if m.is_multiple_of(2) {
        rat(-1, 2)
    } else {
        rat(1, 2)
    }
}

fn push_if_valid(out: &mut FormalSum, g: &DecoratedGraph, c: Rational) {
    if g.is_valid() {
        out.add_term(g, c);
    }
}

/// Turns half-edge `h` into a leg with label `label`, adding `extra` to its ψ-power.
fn open_half_edge(g: &mut DecoratedGraph, h: usize, label: u32, extra: u32) {
    let he = &mut g.half_edges[h];
    he.label = Label::External(label);
    he.psi += extra;
}

/// Cuts each edge in turn. For an edge with ends (h₁, h₂) the four terms are
/// ½[h₁ ↦ iψ^l, h₂ ↦ j], ½(−1)^{l−1}[h₁ ↦ i, h₂ ↦ jψ^l] and the same two with
/// i and j exchanged.
pub fn cut_edges(g: &DecoratedGraph, l: u32, i: u32, j: u32) -> Result<FormalSum> {
    check_labels(g, i, j)?;
    let sign = if l % 2 == 1 { rat(1, 2) } else { rat(-1, 2) };
    let mut out = FormalSum::new();
    for (h1, h2) in g.edges() {
        // (label at h₁, ψ added at h₁, label at h₂, ψ added at h₂, coefficient)
        let terms = [
            (i, l, j, 0, rat(1, 2)),
            (i, 0, j, l, sign.clone()),
            (j, 0, i, l, rat(1, 2)),
            (j, l, i, 0, sign.clone()),
        ];
        for (a, pa, b, pb, c) in terms {
            let mut t = g.clone();
            open_half_edge(&mut t, h1, a, pa);
            open_half_edge(&mut t, h2, b, pb);
            push_if_valid(&mut out, &t, c);
        }
    }
    Ok(out)
}

/// Lowers the genus of one vertex at a time and attaches iψ^{l−1−m}, jψ^m.
pub fn reduce_genus(g: &DecoratedGraph, l: u32, i: u32, j: u32) -> Result<FormalSum> {
    check_labels(g, i, j)?;
    let mut out = FormalSum::new();
    for v in 0..g.num_vertices() {
        if g.vertices[v].genus == 0 {
            continue;
        }
        for m in 0..l {
            let mut t = g.clone();
            t.vertices[v].genus -= 1;
            t.add_leg(v, i, l - 1 - m);
            t.add_leg(v, j, m);
            push_if_valid(&mut out, &t, half_sign(m));
        }
    }
    Ok(out)
}

/// Replaces one vertex at a time by two unconnected vertices of genera
/// g₁ + g₂ = g, distributing its half-edges and κ factors in all ways, with
/// iψ^{l−1−m} on the first and jψ^m on the second.
pub fn split_vertices(g: &DecoratedGraph, l: u32, i: u32, j: u32) -> Result<FormalSum> {
    check_labels(g, i, j)?;
    let mut out = FormalSum::new();
    for v in 0..g.num_vertices() {
        let hs = g.half_edges_at(v);
        let genus = g.vertices[v].genus;
        let kappa = &g.vertices[v].kappa;
        for g1 in 0..=genus {
            let g2 = genus - g1;
            for mask in 0u64..(1 << hs.len()) {
                let n1 = mask.count_ones() as i64 + 1;
                let n2 = hs.len() as i64 - n1 + 2;
                if 2 * g1 as i64 - 2 + n1 <= 0 || 2 * g2 as i64 - 2 + n2 <= 0 {
                    continue;
                }
                for kmask in 0u64..(1 << kappa.len()) {
                    let k1: Vec<u32> =
                        (0..kappa.len()).filter(|b| kmask >> b & 1 == 1).map(|b| kappa[b]).collect();
                    let k2: Vec<u32> =
                        (0..kappa.len()).filter(|b| kmask >> b & 1 == 0).map(|b| kappa[b]).collect();
                    let mut base = g.clone();
                    base.vertices[v] = Vertex::new(g1, k1);
                    let u = base.add_vertex(Vertex::new(g2, k2));
                    for (bit, &h) in hs.iter().enumerate() {
                        if mask >> bit & 1 == 0 {
                            base.half_edges[h].vertex = u;
                        }
                    }
                    for m in 0..l {
                        let mut t = base.clone();
                        t.add_leg(v, i, l - 1 - m);
                        t.add_leg(u, j, m);
                        push_if_valid(&mut out, &t, half_sign(m));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// 𝔯_l of a single graph with explicitly chosen new labels.
pub fn r_graph(g: &DecoratedGraph, l: u32, i: u32, j: u32) -> Result<FormalSum> {
    if l == 0 {
        return Err(TautError::Degenerate("𝔯_l needs l ≥ 1".into()));
    }
    let mut out = cut_edges(g, l, i, j)?;
    out.add_scaled(&reduce_genus(g, l, i, j)?, &Rational::one());
    out.add_scaled(&split_vertices(g, l, i, j)?, &Rational::one());
    Ok(out)
}

/// Arithmetic genus and marked points of the space a graph lives on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ambient {
    pub genus: i64,
    pub labels: BTreeSet<u32>,
}

impl Ambient {
    pub fn of(g: &DecoratedGraph) -> Self {
        Ambient { genus: g.total_genus(), labels: g.external_labels() }
    }

    pub fn dimension(&self) -> i64 {
        3 * self.genus - 3 + self.labels.len() as i64
    }

    /// The two labels 𝔯_l attaches: one and two past the largest marking.
    pub fn new_labels(&self) -> (u32, u32) {
        let n = self.labels.iter().next_back().copied().unwrap_or(0);
        (n + 1, n + 2)
    }
}

impl std::fmt::Display for Ambient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        write!(f, "g={} points={{{}}}", self.genus, labels.join(","))
    }
}

/// The common ambient of every term; `None` for the empty sum.
pub fn common_ambient<'a>(graphs: impl IntoIterator<Item = &'a DecoratedGraph>) -> Result<Option<Ambient>> {
    let mut found: Option<Ambient> = None;
    for g in graphs {
        let a = Ambient::of(g);
        match &found {
            None => found = Some(a),
            Some(b) if *b != a => return Err(TautError::MixedAmbients(b.to_string(), a.to_string())),
            _ => {}
        }
    }
    Ok(found)
}

/// 𝔯_l extended linearly, with new labels n+1 and n+2.
pub fn apply_r(e: &FormalSum, l: u32) -> Result<FormalSum> {
    let Some(amb) = common_ambient(e.iter().map(|(k, _)| k.graph()))? else {
        return Ok(FormalSum::new());
    };
    let (i, j) = amb.new_labels();
    e.try_map_linear(|k| r_graph(k, l, i, j))
}

pub fn apply_r_symbolic(e: &SymbolicSum, l: u32) -> Result<SymbolicSum> {
    let Some(amb) = common_ambient(e.iter().map(|(k, _)| k.graph()))? else {
        return Ok(SymbolicSum::new());
    };
    let (i, j) = amb.new_labels();
    let mut out = SymbolicSum::new();
    for (k, form) in e.iter() {
        for (t, c) in r_graph(k, l, i, j)?.iter() {
            let mut f = crate::formal_sum::LinearForm::new();
            f.add_scaled(form, c);
            if !f.is_zero() {
                out.add_canonical(t.clone(), &f);
            }
        }
    }
    Ok(out)
}

/// Exchanges two leg labels throughout a sum.
pub fn transpose_sum(e: &FormalSum, a: u32, b: u32) -> FormalSum {
    e.map_linear(|k| FormalSum::from_graph(&k.transpose(a, b)))
}

/// Codimension of a graph inside its connected ambient.
pub fn codimension(g: &DecoratedGraph) -> i64 {
    Ambient::of(g).dimension() - g.dimension()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwi::{parse_graph, parse_sum};

    fn g(s: &str) -> DecoratedGraph {
        parse_graph(s).unwrap()
    }

    #[test]
    fn genus_reduction_one_point() {
        let out = reduce_genus(&g("<1>_1"), 1, 2, 3).unwrap();
        assert_eq!(out, parse_sum("-1/2*<1 2 3>_0").unwrap());
    }

    #[test]
    fn genus_reduction_inside_example() {
        let out = reduce_genus(&g("<1 2 e0>_0 <3 4 e1>_0 <e0 e1>_1"), 1, 5, 6).unwrap();
        assert_eq!(out, parse_sum("-1/2*<1 2 e0>_0 <3 4 e1>_0 <e0 e1 5 6>_0").unwrap());
    }

    #[test]
    fn genus_zero_has_no_genus_reduction() {
        assert!(reduce_genus(&g("<1 2 e0>_0 <3 4 e0>_0"), 2, 5, 6).unwrap().is_zero());
    }

    #[test]
    fn cutting_without_edges() {
        assert!(cut_edges(&g("<1 2 3 4>_1"), 1, 5, 6).unwrap().is_zero());
    }

    #[test]
    fn splitting_genus_two_point() {
        let out = split_vertices(&g("<1>_2"), 1, 2, 3).unwrap();
        assert_eq!(out, parse_sum("-1/2*<1 2>_1 <3>_1 - 1/2*<2>_1 <1 3>_1").unwrap());
    }

    #[test]
    fn splitting_three_point_vertex() {
        assert!(split_vertices(&g("<1 2 3>_0"), 1, 4, 5).unwrap().is_zero());
    }

    #[test]
    fn kappa_distribution() {
        let out = split_vertices(&g("<1 2>_2[k1,k2]"), 1, 3, 4).unwrap();
        let shapes: BTreeSet<(Vec<u32>, Vec<u32>)> = out
            .iter()
            .map(|(k, _)| {
                let a = k.half_edges.iter().find(|h| h.label == Label::External(3)).unwrap().vertex;
                let b = k.half_edges.iter().find(|h| h.label == Label::External(4)).unwrap().vertex;
                (k.vertices[a].kappa.clone(), k.vertices[b].kappa.clone())
            })
            .collect();
        assert_eq!(shapes.len(), 4);
    }

    #[test]
    fn label_collisions() {
        assert!(matches!(cut_edges(&g("<1 2 3>_0"), 1, 3, 4), Err(TautError::LabelCollision(3))));
        assert!(apply_r(&parse_sum("<1 2 3>_0 + <1 e0 e0>_0").unwrap(), 1).is_err());
    }
}
