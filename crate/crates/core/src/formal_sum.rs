//! ℚ-linear combinations of canonical graphs, and their symbolic variant
//! whose coefficients are linear forms in unknowns.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::canonical::{automorphism_count, canonicalize, CanonicalForm};
use crate::error::TautError;
use crate::graph::DecoratedGraph;
use crate::{rat, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FormalSum {
    terms: BTreeMap<CanonicalForm, Rational>,
}

impl FormalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_graph(g: &DecoratedGraph) -> Self {
        Self::term(g, Rational::one())
    }

    pub fn term(g: &DecoratedGraph, c: Rational) -> Self {
        let mut s = Self::new();
        s.add_term(g, c);
        s
    }

    pub fn from_terms<'a>(terms: impl IntoIterator<Item = (Rational, &'a DecoratedGraph)>) -> Self {
        let mut s = Self::new();
        for (c, g) in terms {
            s.add_term(g, c);
        }
        s
    }

    pub fn add_term(&mut self, g: &DecoratedGraph, c: Rational) {
        self.add_canonical(canonicalize(g), c);
    }

    pub fn add_canonical(&mut self, key: CanonicalForm, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &FormalSum, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_canonical(k.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> FormalSum {
        if c.is_zero() {
            return FormalSum::new();
        }
        FormalSum { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalForm, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, g: &DecoratedGraph) -> Rational {
        self.terms.get(&canonicalize(g)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get(&self, key: &CanonicalForm) -> Option<&Rational> {
        self.terms.get(key)
    }

    /// Extends a map on single graphs linearly.
    pub fn map_linear<F>(&self, mut f: F) -> FormalSum
    where
        F: FnMut(&CanonicalForm) -> FormalSum,
    {
        let mut out = FormalSum::new();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn try_map_linear<F, E>(&self, mut f: F) -> Result<FormalSum, E>
    where
        F: FnMut(&CanonicalForm) -> Result<FormalSum, E>,
    {
        let mut out = FormalSum::new();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k)?, c);
        }
        Ok(out)
    }

    /// Keeps the terms satisfying `pred`.
    pub fn filter<P: FnMut(&CanonicalForm) -> bool>(&self, mut pred: P) -> FormalSum {
        FormalSum {
            terms: self.terms.iter().filter(|(k, _)| pred(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// Sum of all coefficients.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, b| a + b)
    }

    /// Converts from glued-half-edge coefficients to coefficients of stratum
    /// classes weighted by 1/|Aut|, i.e. each coefficient is multiplied by
    /// the automorphism count of its graph.
    pub fn to_stratum_convention(&self) -> FormalSum {
        FormalSum {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * rat(automorphism_count(k) as i64, 1)))
                .collect(),
        }
    }

    /// Inverse of [`FormalSum::to_stratum_convention`].
    pub fn from_stratum_convention(&self) -> FormalSum {
        FormalSum {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v / rat(automorphism_count(k) as i64, 1)))
                .collect(),
        }
    }
}

impl Add for &FormalSum {
    type Output = FormalSum;
    fn add(self, rhs: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &FormalSum {
    type Output = FormalSum;
    fn sub(self, rhs: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &FormalSum {
    type Output = FormalSum;
    fn neg(self) -> FormalSum {
        self.scale(&-Rational::one())
    }
}

impl FromIterator<(CanonicalForm, Rational)> for FormalSum {
    fn from_iter<I: IntoIterator<Item = (CanonicalForm, Rational)>>(iter: I) -> Self {
        let mut s = FormalSum::new();
        for (k, v) in iter {
            s.add_canonical(k, v);
        }
        s
    }
}

/// Sum of the relabelings of `g` by every permutation of `points`, with
/// isomorphic results merged. The coefficients add up to `points.len()!`.
pub fn symmetrize(g: &DecoratedGraph, points: &[u32]) -> Result<FormalSum, TautError> {
    let labels = g.external_labels();
    if let Some(&p) = points.iter().find(|p| !labels.contains(p)) {
        return Err(TautError::UnknownLabel(p));
    }
    let mut out = FormalSum::new();
    for image in points.iter().copied().permutations(points.len()) {
        let map: BTreeMap<u32, u32> = points.iter().copied().zip(image).collect();
        out.add_term(&g.relabel_external(&map), Rational::one());
    }
    Ok(out)
}

/// Index of an unknown coefficient; displayed 1-based as `c1, c2, …`.
pub type Unknown = usize;

/// Homogeneous linear form Σ aᵢ cᵢ with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    coeffs: BTreeMap<Unknown, Rational>,
}

impl LinearForm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unknown(i: Unknown) -> Self {
        Self::single(i, Rational::one())
    }

    pub fn single(i: Unknown, c: Rational) -> Self {
        let mut f = Self::new();
        f.add(i, c);
        f
    }

    pub fn from_dense(coeffs: &[Rational]) -> Self {
        let mut f = Self::new();
        for (i, c) in coeffs.iter().enumerate() {
            f.add(i, c.clone());
        }
        f
    }

    pub fn add(&mut self, i: Unknown, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &LinearForm, c: &Rational) {
        for (&i, v) in &other.coeffs {
            self.add(i, v * c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Unknown, &Rational)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    pub fn coefficient(&self, i: Unknown) -> Rational {
        self.coeffs.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|i| self.coefficient(i)).collect()
    }

    pub fn max_unknown(&self) -> Option<Unknown> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, (&i, c)| acc + c * &values[i])
    }

    /// Divides by the leading coefficient so that equal rows compare equal.
    pub fn normalized(&self) -> LinearForm {
        match self.coeffs.values().next() {
            None => self.clone(),
            Some(lead) => {
                let inv = lead.recip();
                LinearForm { coeffs: self.coeffs.iter().map(|(&i, c)| (i, c * &inv)).collect() }
            }
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if a.is_one() {
                write!(f, "c{}", i + 1)?;
            } else {
                write!(f, "{}*c{}", a, i + 1)?;
            }
        }
        Ok(())
    }
}

/// A formal sum whose coefficients are linear forms in unknowns cᵢ.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolicSum {
    terms: BTreeMap<CanonicalForm, LinearForm>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no value assigned to unknown c{}", .0 + 1)]
pub struct MissingUnknown(pub Unknown);

impl SymbolicSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Σ cᵢ · columns[i]
    pub fn from_columns(columns: &[FormalSum]) -> Self {
        let mut s = Self::new();
        for (i, col) in columns.iter().enumerate() {
            for (k, c) in col.iter() {
                s.add_canonical(k.clone(), &LinearForm::single(i, c.clone()));
            }
        }
        s
    }

    pub fn add_canonical(&mut self, key: CanonicalForm, form: &LinearForm) {
        let e = self.terms.entry(key.clone()).or_default();
        e.add_scaled(form, &Rational::one());
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_term(&mut self, g: &DecoratedGraph, form: &LinearForm) {
        self.add_canonical(canonicalize(g), form);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalForm, &LinearForm)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of unknowns referenced (one past the largest index).
    pub fn num_unknowns(&self) -> usize {
        self.terms.values().filter_map(LinearForm::max_unknown).max().map_or(0, |m| m + 1)
    }

    /// The formal sum multiplying each unknown.
    pub fn columns(&self) -> Vec<FormalSum> {
        let mut cols = vec![FormalSum::new(); self.num_unknowns()];
        for (k, form) in &self.terms {
            for (i, c) in form.iter() {
                cols[i].add_canonical(k.clone(), c.clone());
            }
        }
        cols
    }

    pub fn specialize(&self, assignment: &BTreeMap<Unknown, Rational>) -> Result<FormalSum, MissingUnknown> {
        let mut out = FormalSum::new();
        for (k, form) in &self.terms {
            let mut v = Rational::zero();
            for (i, c) in form.iter() {
                let x = assignment.get(&i).ok_or(MissingUnknown(i))?;
                v += c * x;
            }
            out.add_canonical(k.clone(), v);
        }
        Ok(out)
    }

    pub fn specialize_dense(&self, values: &[Rational]) -> Result<FormalSum, MissingUnknown> {
        let map: BTreeMap<Unknown, Rational> = values.iter().cloned().enumerate().collect();
        self.specialize(&map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;

    fn example(mu: u32, nu: u32) -> DecoratedGraph {
        use crate::graph::{HalfEdge, Label};
        let he = |vertex, label, psi| HalfEdge { vertex, label, psi };
        DecoratedGraph::new(
            vec![Vertex::bare(0), Vertex::bare(0), Vertex::bare(1)],
            vec![
                he(0, Label::External(1), 0),
                he(0, Label::External(2), 0),
                he(0, Label::Internal(mu), 0),
                he(1, Label::External(3), 0),
                he(1, Label::External(4), 0),
                he(1, Label::Internal(nu), 0),
                he(2, Label::Internal(mu), 0),
                he(2, Label::Internal(nu), 0),
            ],
        )
    }

    #[test]
    fn relabeled_copies_merge() {
        let s = &FormalSum::from_graph(&example(0, 1)) + &FormalSum::from_graph(&example(1, 0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.coefficient(&example(5, 7)), rat(2, 1));
        let d = &FormalSum::from_graph(&example(0, 1)) - &FormalSum::from_graph(&example(1, 0));
        assert!(d.is_zero());
    }

    #[test]
    fn scaling_and_negation() {
        let a = FormalSum::term(&example(0, 1), rat(3, 7));
        assert!((&a + &-&a).is_zero());
        assert!(a.scale(&rat(0, 1)).is_zero());
        assert_eq!(a.scale(&rat(0, 1)), FormalSum::new());
        let b = &a + &FormalSum::term(&example(0, 1), rat(1, 24));
        assert_ne!(a, b);
    }

    #[test]
    fn specialize_symbolic() {
        let g = example(0, 1);
        let mut s = SymbolicSum::new();
        s.add_term(&g, &LinearForm::unknown(0));
        let out = s.specialize(&BTreeMap::from([(0, rat(5, 7))])).unwrap();
        assert_eq!(out, FormalSum::term(&g, rat(5, 7)));
        let zero = s.specialize(&BTreeMap::from([(0, rat(0, 1))])).unwrap();
        assert!(zero.is_zero());
        assert_eq!(s.specialize(&BTreeMap::new()), Err(MissingUnknown(0)));
    }

    #[test]
    fn symmetrize_counts() {
        let g = example(0, 1);
        let s = symmetrize(&g, &[1, 2, 3, 4]).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|(_, c)| *c == rat(8, 1)));
        assert_eq!(symmetrize(&g, &[]).unwrap(), FormalSum::from_graph(&g));
        let star = DecoratedGraph::single_vertex(0, 1..=5);
        assert_eq!(symmetrize(&star, &[1, 2, 3, 4, 5]).unwrap(), FormalSum::term(&star, rat(120, 1)));
        assert!(symmetrize(&g, &[7]).is_err());
    }

    #[test]
    fn linear_form_display() {
        let mut f = LinearForm::new();
        f.add(0, rat(-1, 2));
        f.add(1, rat(-11, 24));
        f.add(5, rat(3, 1));
        assert_eq!(f.to_string(), "-1/2*c1 - 11/24*c2 + 3*c6");
    }
}
