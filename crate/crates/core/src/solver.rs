//! Searching for tautological equations: enumerate classes, impose
//! invariance under the operators 𝔯_l, and solve the resulting linear system.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::canonical::{canonicalize, CanonicalForm};
use crate::error::{Result, TautError};
use crate::formal_sum::{symmetrize, FormalSum, LinearForm, SymbolicSum};
use crate::linalg::{sparse, Rref, SparseRow};
use crate::operators::{apply_r, apply_r_symbolic, common_ambient};
use crate::relations::Registry;
use crate::strata::{decorated_classes, Decorations};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub decorations: Decorations,
    /// Points permuted when choosing orbit representatives.
    pub symmetrize_points: Vec<u32>,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { decorations: Decorations::PsiKappa, symmetrize_points: Vec::new() }
    }
}

/// Largest l for which 𝔯_l can be nonzero on codimension-k classes of
/// M̄_{g,n}.
pub fn max_l(g: u32, n: u32, k: u32) -> u32 {
    (3 * g + n).saturating_sub(3 + k)
}

fn check_ambient(g: u32, n: u32, k: u32) -> Result<()> {
    let bad = || TautError::InvalidAmbient { g: g as i64, n: n as usize, k: k as i64 };
    if 2 * g + n < 3 {
        return Err(bad());
    }
    Ok(())
}

/// Classes of codimension k on M̄_{g,n} with markings 1..n. With
/// symmetrization, the least canonical form of each orbit is kept.
pub fn enumerate(g: u32, n: u32, k: u32, opts: &EnumerateOptions) -> Result<Vec<CanonicalForm>> {
    check_ambient(g, n, k)?;
    if k > 3 * g + n - 3 {
        return Ok(Vec::new());
    }
    let legs: Vec<u32> = (1..=n).collect();
    if let Some(&p) = opts.symmetrize_points.iter().find(|p| !legs.contains(p)) {
        return Err(TautError::UnknownLabel(p));
    }
    let classes = decorated_classes(g, &legs, k as usize, opts.decorations);
    if opts.symmetrize_points.len() < 2 {
        return Ok(classes);
    }
    let points = &opts.symmetrize_points;
    let reps: BTreeSet<CanonicalForm> = classes
        .iter()
        .map(|c| {
            points
                .iter()
                .copied()
                .permutations(points.len())
                .map(|image| {
                    let map: BTreeMap<u32, u32> = points.iter().copied().zip(image).collect();
                    canonicalize(&c.relabel_external(&map))
                })
                .min()
                .unwrap()
        })
        .collect();
    Ok(reps.into_iter().collect())
}

/// The orbit sums Σ_σ σ(Γ) over permutations of `points`, one per class.
pub fn orbit_sums(classes: &[CanonicalForm], points: &[u32]) -> Result<Vec<FormalSum>> {
    classes.iter().map(|c| symmetrize(c, points)).collect()
}

/// E = Σ cᵢ Γᵢ with one unknown per distinct class, in input order.
pub fn general_element(classes: &[FormalSum]) -> SymbolicSum {
    let mut seen = HashSet::new();
    let distinct: Vec<FormalSum> = classes.iter().filter(|c| !c.is_zero() && seen.insert((*c).clone())).cloned().collect();
    SymbolicSum::from_columns(&distinct)
}

/// Drops classes that are combinations of other classes modulo the known
/// relations, preferring to keep later ones.
pub fn independent_classes(classes: &[FormalSum], registry: &Registry) -> Result<Vec<FormalSum>> {
    Ok(registry.class_basis(classes)?.into_iter().map(|i| classes[i].clone()).collect())
}

/// One linear condition on the unknowns, with the coordinate that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub form: LinearForm,
    pub l: u32,
    pub ambient: String,
    pub coordinate: CanonicalForm,
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l={} {} {}", self.l, self.ambient, self.form)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_unknowns: usize,
    pub rows: Vec<Row>,
}

impl LinearSystem {
    pub fn sparse_rows(&self) -> Vec<SparseRow> {
        self.rows.iter().map(|r| r.form.iter().map(|(i, c)| (i, c.clone())).collect()).collect()
    }

    pub fn rank(&self) -> usize {
        Rref::from_rows(&self.sparse_rows()).rank()
    }
}

/// Ambient label of a product of connected spaces, such as
/// `g0{1,2,5}k0*g1{3,4,6}k2`.
pub fn ambient_label(g: &CanonicalForm) -> String {
    let comps = g.component_graphs();
    if comps.is_empty() {
        return "point".into();
    }
    comps
        .iter()
        .map(|c| format!("g{}{{{}}}k{}", c.total_genus(), c.external_labels().iter().join(","), c.num_edges()))
        .join("*")
}

/// Rows Σ aᵢ cᵢ = 0 from the coordinates of 𝔯_l(E) for l in 1..=lmax.
pub fn invariance_system(e: &SymbolicSum, lmax: u32, registry: &Registry) -> Result<LinearSystem> {
    let mut sys = LinearSystem { num_unknowns: e.num_unknowns(), rows: Vec::new() };
    let mut seen = BTreeSet::new();
    for l in 1..=lmax {
        let image = registry.normal_form_symbolic(&apply_r_symbolic(e, l)?)?;
        for (k, form) in image.iter() {
            let normalized = form.normalized();
            if seen.insert(normalized) {
                sys.rows.push(Row { form: form.clone(), l, ambient: ambient_label(k), coordinate: k.clone() });
            }
        }
    }
    Ok(sys)
}

/// A basis of the solution space, one vector per free unknown. Pivots are
/// taken leftmost, so the free unknowns are the highest-index ones the
/// system allows.
pub fn solve_nullspace(sys: &LinearSystem) -> Vec<Vec<Rational>> {
    Rref::from_rows(&sys.sparse_rows()).nullspace(sys.num_unknowns)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationCandidate {
    /// Values of the unknowns, a primitive integer vector.
    pub coefficients: Vec<Rational>,
    pub equation: FormalSum,
    /// The equation already follows from the known relations.
    pub trivial: bool,
}

/// Scales to a primitive integer vector whose first nonzero entry is positive.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let nonzero: Vec<&Rational> = v.iter().filter(|c| !c.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        return v.to_vec();
    };
    let lcm = nonzero.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = nonzero.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * &lcm / c.denom())));
    let mut scale = Rational::new(lcm, gcd);
    if first.is_negative() {
        scale = -scale;
    }
    v.iter().map(|c| c * &scale).collect()
}

/// Splits the solution space into directions that vanish modulo the known
/// relations (trivial) and a complement of new equations.
///
/// The trivial directions come first. Each new equation is taken from the
/// given basis and has its coordinate cleared at the last nonzero unknown of
/// every trivial direction.
pub fn filter_trivial(solutions: &[Vec<Rational>], e: &SymbolicSum, registry: &Registry) -> Result<Vec<EquationCandidate>> {
    let m = e.num_unknowns();
    if let Some(i) = solutions.iter().position(|s| s.iter().all(Zero::is_zero)) {
        return Err(TautError::Degenerate(format!("solution vector {} is zero", i + 1)));
    }
    let specialize = |s: &[Rational]| e.specialize_dense(s).expect("one value per unknown");
    let mut graph_index: BTreeMap<CanonicalForm, usize> = BTreeMap::new();
    let mut images = Vec::new();
    for s in solutions {
        let nf = registry.normal_form(&specialize(s))?;
        for (k, _) in nf.iter() {
            let next = graph_index.len();
            graph_index.entry(k.clone()).or_insert(next);
        }
        images.push(nf);
    }
    // Rows indexed by graph, columns by solution: its kernel combines
    // solutions into trivial equations.
    let mut by_graph: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for (j, nf) in images.iter().enumerate() {
        for (k, c) in nf.iter() {
            by_graph.entry(graph_index[k]).or_default().insert(j, c.clone());
        }
    }
    let combos = Rref::from_rows(by_graph.values()).nullspace(solutions.len());
    let combine = |a: &[Rational]| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); m];
        for (coef, s) in a.iter().zip(solutions) {
            for (x, y) in v.iter_mut().zip(s) {
                *x += coef * y;
            }
        }
        v
    };
    let trivial: Vec<Vec<Rational>> = combos.iter().map(|a| combine(a)).collect();

    // Trivial directions reduced with pivots at their last nonzero entries.
    let reversed = |v: &[Rational]| -> SparseRow { sparse(&v.iter().rev().cloned().collect::<Vec<_>>()) };
    let mut span = Rref::new();
    for t in &trivial {
        span.insert(reversed(t));
    }
    let clear = span.clone();
    let mut fresh = Vec::new();
    for s in solutions {
        if span.insert(reversed(s)) {
            let mut r = clear.reduce(&reversed(s));
            let v: Vec<Rational> = (0..m).map(|i| r.remove(&(m - 1 - i)).unwrap_or_else(Rational::zero)).collect();
            fresh.push(v);
        }
    }

    let mut out = Vec::new();
    for (vectors, flag) in [(&trivial, true), (&fresh, false)] {
        for v in vectors {
            let coefficients = primitive(v);
            out.push(EquationCandidate { equation: specialize(&coefficients), coefficients, trivial: flag });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub l: u32,
    pub residual: FormalSum,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Normal form of 𝔯_l(E) for each l in 1..=lmax.
pub fn check_invariance(e: &FormalSum, lmax: u32, registry: &Registry) -> Result<Vec<InvarianceReport>> {
    (1..=lmax).map(|l| Ok(InvarianceReport { l, residual: registry.normal_form(&apply_r(e, l)?)? })).collect()
}

/// The default l range for an expression: up to the vanishing bound of its
/// ambient and codimension.
pub fn default_lmax(e: &FormalSum) -> Result<u32> {
    let Some(amb) = common_ambient(e.iter().map(|(k, _)| k.graph()))? else {
        return Ok(0);
    };
    let k = e.iter().map(|(g, _)| amb.dimension() - g.dimension()).min().unwrap_or(0);
    Ok((amb.dimension() - k).max(0) as u32)
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub classes: Vec<FormalSum>,
    pub element: SymbolicSum,
    pub system: LinearSystem,
    pub nullspace: Vec<Vec<Rational>>,
    pub candidates: Vec<EquationCandidate>,
}

/// The whole search on M̄_{g,n} in codimension k. Stored relations of that
/// same ambient are ignored so they can be rediscovered.
pub fn find_equations(g: u32, n: u32, k: u32, opts: &EnumerateOptions, lmax: Option<u32>, registry: &Registry) -> Result<SearchReport> {
    let reps = enumerate(g, n, k, opts)?;
    let classes = if opts.symmetrize_points.len() < 2 {
        reps.iter().map(|c| FormalSum::from_graph(c)).collect()
    } else {
        orbit_sums(&reps, &opts.symmetrize_points)?
    };
    search_classes(g, n, k, classes, lmax, registry)
}

/// The search with the classes, and so the order of the unknowns, given.
pub fn search_classes(g: u32, n: u32, k: u32, classes: Vec<FormalSum>, lmax: Option<u32>, registry: &Registry) -> Result<SearchReport> {
    check_ambient(g, n, k)?;
    let element = general_element(&classes);
    let registry = registry.excluding((g, n, k));
    let lmax = lmax.unwrap_or_else(|| max_l(g, n, k)).min(max_l(g, n, k));
    if lmax == 0 {
        return Ok(SearchReport { classes, element, system: LinearSystem::default(), nullspace: Vec::new(), candidates: Vec::new() });
    }
    let system = invariance_system(&element, lmax, &registry)?;
    let nullspace = solve_nullspace(&system);
    let candidates = filter_trivial(&nullspace, &element, &registry)?;
    Ok(SearchReport { classes, element, system, nullspace, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwi::parse_sum;
    use crate::rat;

    fn opts(decorations: Decorations, points: &[u32]) -> EnumerateOptions {
        EnumerateOptions { decorations, symmetrize_points: points.to_vec() }
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate(0, 4, 1, &opts(Decorations::None, &[])).unwrap().len(), 3);
        assert!(enumerate(0, 3, 1, &opts(Decorations::None, &[])).unwrap().is_empty());
        assert_eq!(enumerate(0, 3, 0, &opts(Decorations::PsiKappa, &[])).unwrap().len(), 1);
        assert_eq!(enumerate(1, 4, 2, &opts(Decorations::None, &[1, 2, 3, 4])).unwrap().len(), 9);
        assert_eq!(enumerate(0, 4, 1, &opts(Decorations::None, &[1, 2, 3, 4])).unwrap().len(), 1);
        assert!(enumerate(0, 2, 0, &EnumerateOptions::default()).is_err());
        assert!(enumerate(0, 4, 1, &opts(Decorations::None, &[1, 7])).is_err());
    }

    #[test]
    fn general_element_deduplicates() {
        let a = parse_sum("<1 2 e0>_0 <3 4 e0>_0").unwrap();
        let b = parse_sum("<1 3 e0>_0 <2 4 e0>_0").unwrap();
        let e = general_element(&[a.clone(), b.clone(), a.clone()]);
        assert_eq!(e.num_unknowns(), 2);
        assert!(general_element(&[]).is_empty());
    }

    #[test]
    fn nullspace_of_single_row() {
        let sys = LinearSystem {
            num_unknowns: 2,
            rows: vec![Row {
                form: LinearForm::from_dense(&[rat(1, 1), rat(-1, 1)]),
                l: 1,
                ambient: String::new(),
                coordinate: canonicalize(&Default::default()),
            }],
        };
        assert_eq!(solve_nullspace(&sys), vec![vec![rat(1, 1), rat(1, 1)]]);
    }

    #[test]
    fn primitive_vectors() {
        assert_eq!(primitive(&[rat(-1, 2), rat(1, 3), rat(0, 1)]), vec![rat(3, 1), rat(-2, 1), rat(0, 1)]);
        assert_eq!(primitive(&[rat(0, 1), rat(4, 1), rat(6, 1)]), vec![rat(0, 1), rat(2, 1), rat(3, 1)]);
    }

    #[test]
    fn m04_boundary_points_are_equal_but_trivially() {
        let classes: Vec<FormalSum> = enumerate(0, 4, 1, &opts(Decorations::None, &[]))
            .unwrap()
            .iter()
            .map(|c| FormalSum::from_graph(c))
            .collect();
        let e = general_element(&classes);
        let reg = Registry::new();
        let sols = vec![vec![rat(1, 1), rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1), rat(1, 1)]];
        let cands = filter_trivial(&sols, &e, &reg).unwrap();
        assert_eq!(cands.iter().filter(|c| c.trivial).count(), 1);
        assert_eq!(cands.iter().filter(|c| !c.trivial).count(), 1);
        assert!(filter_trivial(&[vec![rat(0, 1); 3]], &e, &reg).is_err());
    }

    #[test]
    fn genus_one_trr_is_invariant() {
        let trr = parse_sum("<1^1>_1 - 1/24*<1 e0 e0>_0").unwrap();
        let reg = Registry::new();
        assert!(reg.is_zero_modulo(&trr).unwrap());
        assert_eq!(default_lmax(&trr).unwrap(), 0);
        for rep in check_invariance(&trr, 3, &reg).unwrap() {
            assert!(rep.holds());
        }
    }
}
