//! Exact sparse row reduction over ℚ.
//!
//! Pivots are always the leftmost nonzero entry of a row, so in a nullspace
//! computation the free unknowns are the highest-indexed ones that can be
//! free, and in a relation matrix the basis (non-pivot columns) leans towards
//! the later columns.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

pub fn sparse(dense: &[Rational]) -> SparseRow {
    dense.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
}

pub fn dense(row: &SparseRow, n: usize) -> Vec<Rational> {
    (0..n).map(|i| row.get(&i).cloned().unwrap_or_else(Rational::zero)).collect()
}

fn axpy(target: &mut SparseRow, a: &Rational, x: &SparseRow) {
    for (&i, v) in x {
        let e = target.entry(i).or_insert_with(Rational::zero);
        *e += a * v;
        if e.is_zero() {
            target.remove(&i);
        }
    }
}

/// A reduced row echelon form that grows one row at a time.
///
/// Every stored row has pivot entry 1 and is zero in every other pivot
/// column.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    rows: BTreeMap<usize, SparseRow>,
}

impl Rref {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows<'a>(rows: impl IntoIterator<Item = &'a SparseRow>) -> Self {
        let mut r = Self::new();
        for row in rows {
            r.insert(row.clone());
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    pub fn row(&self, pivot: usize) -> Option<&SparseRow> {
        self.rows.get(&pivot)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.rows.iter().map(|(&p, r)| (p, r))
    }

    /// Remainder of `v` modulo the row space; it vanishes on every pivot column.
    pub fn reduce(&self, v: &SparseRow) -> SparseRow {
        let mut out = v.clone();
        for (col, c) in v {
            if let Some(row) = self.rows.get(col) {
                axpy(&mut out, &-c.clone(), row);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds a row; returns false when it was already in the span.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let mut r = self.reduce(&v);
        let (p, lead) = match r.iter().next() {
            None => return false,
            Some((&p, lead)) => (p, lead.clone()),
        };
        if !lead.is_one() {
            let inv = lead.recip();
            for c in r.values_mut() {
                *c *= &inv;
            }
        }
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(&p).cloned() {
                axpy(row, &-c, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }

    /// Basis of {x : row · x = 0 for every row}, one vector per free column
    /// in increasing order; the free coordinate is 1 and the others are 0.
    pub fn nullspace(&self, ncols: usize) -> Vec<Vec<Rational>> {
        (0..ncols)
            .filter(|c| !self.rows.contains_key(c))
            .map(|free| {
                let mut x = vec![Rational::zero(); ncols];
                x[free] = Rational::one();
                for (&p, row) in &self.rows {
                    if let Some(c) = row.get(&free) {
                        x[p] = -c.clone();
                    }
                }
                x
            })
            .collect()
    }
}

pub fn rank(rows: &[SparseRow]) -> usize {
    Rref::from_rows(rows).rank()
}

pub fn nullspace(rows: &[SparseRow], ncols: usize) -> Vec<Vec<Rational>> {
    Rref::from_rows(rows).nullspace(ncols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;
    use proptest::prelude::*;

    fn row(v: &[i64]) -> SparseRow {
        sparse(&v.iter().map(|&x| rat(x, 1)).collect::<Vec<_>>())
    }

    #[test]
    fn single_relation() {
        let ns = nullspace(&[row(&[1, -1])], 2);
        assert_eq!(ns, vec![vec![rat(1, 1), rat(1, 1)]]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let rows = [row(&[1, 2, 0]), row(&[0, 1, 1]), row(&[1, 0, 1])];
        assert_eq!(rank(&rows), 3);
        assert!(nullspace(&rows, 3).is_empty());
    }

    #[test]
    fn reduce_is_zero_on_pivots() {
        let r = Rref::from_rows(&[row(&[2, 4, 0, 2]), row(&[1, 3, 1, 0])]);
        let v = row(&[5, 1, 7, 3]);
        let rem = r.reduce(&v);
        for p in r.pivots() {
            assert!(!rem.contains_key(&p));
        }
        assert!(r.contains(&row(&[3, 7, 1, 2])));
    }

    /// Plain dense elimination, used as an independent rank oracle.
    fn dense_rank(mut m: Vec<Vec<Rational>>, ncols: usize) -> usize {
        let mut rank = 0;
        for c in 0..ncols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    for k in 0..ncols {
                        let d = &f * &m[rank][k];
                        m[r][k] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn nullspace_matches_oracle(
            ncols in 1usize..7,
            entries in proptest::collection::vec(proptest::collection::vec(-3i64..4, 7), 0..7),
        ) {
            let dense_rows: Vec<Vec<Rational>> =
                entries.iter().map(|r| r[..ncols].iter().map(|&x| rat(x, 1)).collect()).collect();
            let rows: Vec<SparseRow> = dense_rows.iter().map(|r| sparse(r)).collect();
            let ns = nullspace(&rows, ncols);
            for x in &ns {
                for r in &dense_rows {
                    let dot = r.iter().zip(x).fold(Rational::zero(), |a, (p, q)| a + p * q);
                    prop_assert!(dot.is_zero());
                }
            }
            let rk = dense_rank(dense_rows, ncols);
            prop_assert_eq!(rank(&rows), rk);
            prop_assert_eq!(ns.len(), ncols - rk);
        }
    }
}
