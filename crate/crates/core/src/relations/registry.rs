//! The relation registry: generated WDVV relations, relations read from
//! disk, and the normal forms they induce.
//!
//! Every connected ambient (g, n, k) is handled with markings 1..n; graphs
//! with other labels are relabeled order-preservingly, reduced, and mapped
//! back. A disconnected graph is the product of its components, so its normal
//! form is the product of theirs.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::Zero;

use crate::canonical::{canonicalize, CanonicalForm};
use crate::error::{Result, TautError};
use crate::formal_sum::{FormalSum, LinearForm, SymbolicSum};
use crate::graph::DecoratedGraph;
use crate::gwi;
use crate::linalg::{Rref, SparseRow};
use crate::operators::common_ambient;
use crate::relations::induce::{pullback_forgetful, substitute};
use crate::relations::rewrite::reduce_sum;
use crate::relations::wdvv::all_wdvv_relations;
use crate::strata::{decorated_classes, undecorated_strata, Decorations};

/// (genus, number of markings, codimension)
pub type AmbientKey = (u32, u32, u32);

/// Coordinates of a class in the chosen basis, written as a combination of
/// basis graphs.
pub type NormalForm = FormalSum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Generated,
    Imported,
    Induced,
}

impl Provenance {
    fn as_str(self) -> &'static str {
        match self {
            Provenance::Generated => "generated",
            Provenance::Imported => "imported",
            Provenance::Induced => "induced",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// Edges glue half-edges; no automorphism factors in coefficients.
    GluedHalfEdges,
    /// Coefficients multiply stratum classes, which differ by |Aut|.
    StratumClasses,
}

impl Convention {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "glued-half-edges" => Some(Convention::GluedHalfEdges),
            "stratum-classes" => Some(Convention::StratumClasses),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StoredRelation {
    /// Always kept in the glued-half-edge convention.
    pub relation: FormalSum,
    pub provenance: Provenance,
    pub source: String,
}

/// The relations and basis of one connected ambient with markings 1..n.
#[derive(Debug)]
pub struct AmbientBasis {
    pub key: AmbientKey,
    columns: Vec<CanonicalForm>,
    index: HashMap<CanonicalForm, usize>,
    rref: Rref,
    relations_seen: usize,
}

impl AmbientBasis {
    pub fn columns(&self) -> &[CanonicalForm] {
        &self.columns
    }

    /// The strata left as basis after quotienting by the relations.
    pub fn basis(&self) -> Vec<CanonicalForm> {
        (0..self.columns.len()).filter(|&c| !self.rref.is_pivot(c)).map(|c| self.columns[c].clone()).collect()
    }

    pub fn relation_rank(&self) -> usize {
        self.rref.rank()
    }

    /// Number of relation vectors generated before reduction.
    pub fn relations_seen(&self) -> usize {
        self.relations_seen
    }

    fn row_of(&self, e: &FormalSum) -> SparseRow {
        e.iter()
            .map(|(k, c)| {
                let col = *self.index.get(k).unwrap_or_else(|| {
                    panic!("{} is not a stratum of ambient {:?}", gwi::format_graph(k), self.key)
                });
                (col, c.clone())
            })
            .collect()
    }

    /// Coordinates of a combination of strata of this ambient.
    pub fn reduce(&self, e: &FormalSum) -> FormalSum {
        let rem = self.rref.reduce(&self.row_of(e));
        rem.into_iter().map(|(c, v)| (self.columns[c].clone(), v)).collect()
    }

    pub fn contains(&self, k: &CanonicalForm) -> bool {
        self.index.contains_key(k)
    }
}

type BasisCell = Arc<OnceLock<Arc<AmbientBasis>>>;

#[derive(Debug, Default)]
pub struct Registry {
    root: Option<PathBuf>,
    stored: BTreeMap<AmbientKey, Vec<StoredRelation>>,
    excluded: BTreeSet<AmbientKey>,
    ambients: Mutex<HashMap<AmbientKey, BasisCell>>,
    components: Mutex<HashMap<CanonicalForm, FormalSum>>,
}

/// Ambient of a relation whose terms carry markings 1..n.
fn relation_key(rel: &FormalSum) -> Result<Option<AmbientKey>> {
    let Some(amb) = common_ambient(rel.iter().map(|(k, _)| k.graph()))? else {
        return Ok(None);
    };
    let n = amb.labels.len() as u32;
    if amb.genus < 0 || amb.labels.iter().copied().ne(1..=n) {
        return Err(TautError::Degenerate(format!("relation must live on a connected space with markings 1..n, found {amb}")));
    }
    let dim = amb.dimension();
    let mut k = None;
    for (g, _) in rel.iter() {
        let c = dim - g.dimension();
        if *k.get_or_insert(c) != c {
            return Err(TautError::Degenerate("relation mixes codimensions".into()));
        }
    }
    Ok(Some((amb.genus as u32, n, k.unwrap_or(0) as u32)))
}

fn parse_file_name(name: &str) -> Option<AmbientKey> {
    let stem = name.strip_suffix(".gwi")?.strip_prefix('g')?;
    let (g, rest) = stem.split_once('n')?;
    let (n, k) = rest.split_once('k')?;
    Some((g.parse().ok()?, n.parse().ok()?, k.parse().ok()?))
}

pub fn file_name(key: AmbientKey) -> String {
    format!("g{}n{}k{}.gwi", key.0, key.1, key.2)
}

/// Order-preserving relabeling of the legs of `g` to 1..n, and its inverse.
fn standardize(g: &DecoratedGraph) -> (DecoratedGraph, BTreeMap<u32, u32>) {
    let labels = g.external_labels();
    let forward: BTreeMap<u32, u32> = labels.iter().copied().zip(1..).collect();
    let back = forward.iter().map(|(&a, &b)| (b, a)).collect();
    (g.relabel_external(&forward), back)
}

impl Clone for Registry {
    fn clone(&self) -> Self {
        Registry {
            root: self.root.clone(),
            stored: self.stored.clone(),
            excluded: self.excluded.clone(),
            ..Default::default()
        }
    }
}

impl Registry {
    /// A registry with generated relations only.
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads every `g<g>n<n>k<k>.gwi` file under `root`.
    pub fn load(root: &Path) -> Result<Self> {
        let mut reg = Registry { root: Some(root.to_path_buf()), ..Default::default() };
        let mut entries: Vec<PathBuf> = std::fs::read_dir(root)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
        entries.sort();
        for path in entries {
            let Some(key) = path.file_name().and_then(|n| n.to_str()).and_then(parse_file_name) else {
                continue;
            };
            let text = std::fs::read_to_string(&path)?;
            for rel in parse_relation_file(&text, &path)? {
                if relation_key(&rel.relation)?.is_some_and(|k| k != key) {
                    return Err(TautError::Registry {
                        path: path.display().to_string(),
                        reason: format!("relation does not live in {}", file_name(key)),
                    });
                }
                reg.stored.entry(key).or_default().push(rel);
            }
        }
        Ok(reg)
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Adds a relation; its ambient is read off its terms.
    pub fn store(&mut self, relation: FormalSum, provenance: Provenance, source: &str) -> Result<()> {
        let Some(key) = relation_key(&relation)? else {
            return Ok(());
        };
        self.stored.entry(key).or_default().push(StoredRelation { relation, provenance, source: source.into() });
        self.ambients.lock().unwrap().clear();
        self.components.lock().unwrap().clear();
        Ok(())
    }

    pub fn stored(&self) -> &BTreeMap<AmbientKey, Vec<StoredRelation>> {
        &self.stored
    }

    /// The same registry with the stored relations of `key` ignored, as
    /// needed when searching for the relations of that ambient.
    pub fn excluding(&self, key: AmbientKey) -> Registry {
        let mut r = self.clone();
        r.excluded.insert(key);
        r
    }

    /// Writes one file per ambient.
    pub fn save(&self, root: &Path) -> Result<()> {
        std::fs::create_dir_all(root)?;
        for (&key, rels) in &self.stored {
            std::fs::write(root.join(file_name(key)), format_relation_file(rels))?;
        }
        Ok(())
    }

    fn imports(&self) -> impl Iterator<Item = (&AmbientKey, &Vec<StoredRelation>)> {
        self.stored.iter().filter(|(k, _)| !self.excluded.contains(k))
    }

    fn check_supported(&self, key: AmbientKey) -> Result<()> {
        let (g, n, k) = key;
        let missing = |g: u32, n: u32, k: u32| TautError::InductiveDataMissing { g: g as i64, n: n as usize, k: k as i64 };
        if g >= 2 && k > 0 {
            return Err(missing(g, n, k));
        }
        let getzler = (1, 4, 2);
        if g == 1 && n >= 4 && k >= 2 && !self.excluded.contains(&getzler) && !self.stored.contains_key(&getzler) {
            return Err(missing(1, 4, 2));
        }
        Ok(())
    }

    /// Basis and relations of the connected ambient (g, n, k).
    pub fn relation_basis(&self, g: u32, n: u32, k: u32) -> Result<Arc<AmbientBasis>> {
        let key = (g, n, k);
        self.check_supported(key)?;
        let cell = self.ambients.lock().unwrap().entry(key).or_default().clone();
        Ok(cell.get_or_init(|| Arc::new(self.build(key))).clone())
    }

    fn build(&self, key: AmbientKey) -> AmbientBasis {
        let (g, n, k) = key;
        let legs: Vec<u32> = (1..=n).collect();
        let columns: Vec<CanonicalForm> = undecorated_strata(g, &legs, k as usize).to_vec();
        let index = columns.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let mut basis = AmbientBasis { key, columns, index, rref: Rref::new(), relations_seen: 0 };
        let add = |basis: &mut AmbientBasis, rel: &FormalSum| {
            basis.relations_seen += 1;
            let row = basis.row_of(rel);
            basis.rref.insert(row);
        };
        if k >= 1 {
            for host in undecorated_strata(g, &legs, k as usize - 1).iter() {
                for rel in all_wdvv_relations(host) {
                    add(&mut basis, &rel);
                }
            }
        }
        let imports: Vec<(AmbientKey, Vec<FormalSum>)> =
            self.imports().map(|(&key, rels)| (key, rels.iter().map(|r| r.relation.clone()).collect())).collect();
        for ((g0, n0, k0), rels) in imports {
            if k0 > k {
                continue;
            }
            let hosts = decorated_classes(g, &legs, (k - k0) as usize, Decorations::PsiKappa);
            let symmetric: Vec<bool> = rels.iter().map(|r| is_symmetric(r, n0)).collect();
            let mut pulled: HashMap<u32, Vec<FormalSum>> = HashMap::new();
            for host in &hosts {
                for w in 0..host.num_vertices() {
                    let hs = host.half_edges_at(w);
                    let m = hs.len() as u32;
                    if host.vertices[w].genus != g0 || m < n0 {
                        continue;
                    }
                    let versions = pulled.entry(m).or_insert_with(|| {
                        rels.iter()
                            .map(|r| {
                                let mut r = r.clone();
                                for x in n0 + 1..=m {
                                    r = r.map_linear(|t| pullback_forgetful(t, x));
                                }
                                r
                            })
                            .collect()
                    });
                    for (rel, &sym) in versions.iter().zip(&symmetric) {
                        let images: Vec<Vec<usize>> = if sym {
                            hs.iter().copied().combinations(n0 as usize).collect()
                        } else {
                            hs.iter().copied().permutations(n0 as usize).collect()
                        };
                        for image in images {
                            let rest: Vec<usize> = hs.iter().copied().filter(|h| !image.contains(h)).collect();
                            let assign: BTreeMap<u32, usize> = (1..=n0)
                                .zip(image.iter().copied())
                                .chain((n0 + 1..=m).zip(rest.iter().copied()))
                                .collect();
                            let placed = place(host, w, rel, &assign);
                            let reduced = reduce_sum(&placed).expect("genus ≤ 1 decorations reduce");
                            add(&mut basis, &reduced);
                        }
                    }
                }
            }
        }
        basis
    }

    /// Normal form of a connected undecorated graph.
    fn component_normal_form(&self, comp: &DecoratedGraph) -> Result<FormalSum> {
        let (std, back) = standardize(comp);
        let key = canonicalize(&std);
        let cached = self.components.lock().unwrap().get(&key).cloned();
        let nf = match cached {
            Some(nf) => nf,
            None => {
                let genus = key.total_genus() as u32;
                let n = key.external_labels().len() as u32;
                let k = key.num_edges() as u32;
                let basis = self.relation_basis(genus, n, k)?;
                let nf = basis.reduce(&FormalSum::from_graph(&key));
                self.components.lock().unwrap().insert(key, nf.clone());
                nf
            }
        };
        Ok(nf.map_linear(|t| FormalSum::from_graph(&t.relabel_external(&back))))
    }

    /// Normal form of an undecorated, possibly disconnected graph.
    fn undecorated_normal_form(&self, g: &DecoratedGraph) -> Result<FormalSum> {
        let mut acc = FormalSum::from_graph(&DecoratedGraph::default());
        for comp in g.component_graphs() {
            let nf = self.component_normal_form(&comp)?;
            let mut next = FormalSum::new();
            for (a, ca) in acc.iter() {
                for (b, cb) in nf.iter() {
                    next.add_term(&a.disjoint_union(b), ca * cb);
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn normal_form(&self, e: &FormalSum) -> Result<NormalForm> {
        let reduced = reduce_sum(e)?;
        let mut out = FormalSum::new();
        for (k, c) in reduced.iter() {
            out.add_scaled(&self.undecorated_normal_form(k)?, c);
        }
        Ok(out)
    }

    pub fn normal_form_symbolic(&self, e: &SymbolicSum) -> Result<SymbolicSum> {
        let cols: Vec<FormalSum> = e.columns().iter().map(|c| self.normal_form(c)).collect::<Result<_>>()?;
        Ok(SymbolicSum::from_columns(&cols))
    }

    pub fn is_zero_modulo(&self, e: &FormalSum) -> Result<bool> {
        Ok(self.normal_form(e)?.is_zero())
    }

    /// Indices of a maximal independent subset of `classes` modulo the
    /// relations, chosen from the back so later classes are preferred.
    pub fn class_basis(&self, classes: &[FormalSum]) -> Result<Vec<usize>> {
        let nfs: Vec<FormalSum> = classes.iter().map(|c| self.normal_form(c)).collect::<Result<_>>()?;
        let mut keys: BTreeMap<CanonicalForm, usize> = BTreeMap::new();
        for nf in &nfs {
            for (k, _) in nf.iter() {
                let next = keys.len();
                keys.entry(k.clone()).or_insert(next);
            }
        }
        let mut rref = Rref::new();
        let mut chosen = Vec::new();
        for (i, nf) in nfs.iter().enumerate().rev() {
            let row: SparseRow = nf.iter().map(|(k, c)| (keys[k], c.clone())).collect();
            if rref.insert(row) {
                chosen.push(i);
            }
        }
        chosen.reverse();
        Ok(chosen)
    }
}

impl Registry {
    /// Writes `target` as a combination of `classes` modulo the relations,
    /// using only the classes chosen by [`Registry::class_basis`]. Returns
    /// `None` when `target` is outside their span.
    pub fn express(&self, classes: &[FormalSum], target: &FormalSum) -> Result<Option<LinearForm>> {
        let chosen = self.class_basis(classes)?;
        let mut columns: Vec<FormalSum> = chosen.iter().map(|&i| self.normal_form(&classes[i])).collect::<Result<_>>()?;
        columns.push(-&self.normal_form(target)?);
        let mut by_graph: BTreeMap<CanonicalForm, SparseRow> = BTreeMap::new();
        for (j, col) in columns.iter().enumerate() {
            for (k, c) in col.iter() {
                by_graph.entry(k.clone()).or_default().insert(j, c.clone());
            }
        }
        let m = chosen.len();
        let kernel = Rref::from_rows(by_graph.values()).nullspace(m + 1);
        let Some(x) = kernel.into_iter().find(|x| !x[m].is_zero()) else {
            return Ok(None);
        };
        let mut form = LinearForm::new();
        for (pos, &i) in chosen.iter().enumerate() {
            form.add(i, &x[pos] / &x[m]);
        }
        Ok(Some(form))
    }
}

/// Whether `rel` is unchanged by every permutation of the markings 1..n.
fn is_symmetric(rel: &FormalSum, n: u32) -> bool {
    (1..n).all(|a| {
        let swap = BTreeMap::from([(a, a + 1), (a + 1, a)]);
        rel.map_linear(|t| FormalSum::from_graph(&t.relabel_external(&swap))) == *rel
    })
}

/// Inserts each term of `rel` at vertex `w` of `host`, spreading the κ
/// factors of `w` over the new vertices in all labeled ways.
fn place(host: &DecoratedGraph, w: usize, rel: &FormalSum, assign: &BTreeMap<u32, usize>) -> FormalSum {
    let kappa = host.vertices[w].kappa.clone();
    let mut bare_host = host.clone();
    bare_host.vertices[w].kappa.clear();
    let mut out = FormalSum::new();
    for (t, c) in rel.iter() {
        let g = substitute(&bare_host, w, t, assign);
        let first_new = host.num_vertices() - 1;
        let new_vertices: Vec<usize> = (first_new..g.num_vertices()).collect();
        let mut versions = vec![g];
        for &a in &kappa {
            versions = versions
                .into_iter()
                .flat_map(|v| {
                    new_vertices.iter().map(move |&nv| {
                        let mut v = v.clone();
                        v.vertices[nv].kappa.push(a);
                        v.vertices[nv].kappa.sort_unstable();
                        v
                    })
                })
                .collect();
        }
        for v in versions {
            out.add_term(&v, c.clone());
        }
    }
    out
}

fn parse_relation_file(text: &str, path: &Path) -> Result<Vec<StoredRelation>> {
    let err = |reason: String| TautError::Registry { path: path.display().to_string(), reason };
    let mut convention = None;
    let mut provenance = Provenance::Imported;
    let mut source = String::new();
    let mut blocks: Vec<Vec<&str>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(c) = comment.strip_prefix("convention:") {
                convention = Some(Convention::parse(c.trim()).ok_or_else(|| err(format!("unknown convention {}", c.trim())))?);
            } else if let Some(k) = comment.strip_prefix("kappa:") {
                if k.trim() != "arbarello-cornalba" {
                    return Err(err(format!("unsupported κ convention {}", k.trim())));
                }
            } else if let Some(p) = comment.strip_prefix("provenance:") {
                provenance = match p.trim() {
                    "generated" => Provenance::Generated,
                    "induced" => Provenance::Induced,
                    _ => Provenance::Imported,
                };
            } else if let Some(s) = comment.strip_prefix("source:") {
                source = s.trim().to_string();
            }
        } else if line.is_empty() {
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().unwrap().push(line);
        }
    }
    let convention = convention.ok_or_else(|| err("missing `# convention:` header".into()))?;
    let mut out = Vec::new();
    for block in blocks.into_iter().filter(|b| !b.is_empty()) {
        let mut rel = gwi::parse_sum(&block.join(" ")).map_err(|e| err(e.to_string()))?;
        if convention == Convention::StratumClasses {
            rel = rel.from_stratum_convention();
        }
        if !rel.is_zero() {
            out.push(StoredRelation { relation: rel, provenance, source: source.clone() });
        }
    }
    Ok(out)
}

pub fn format_relation_file(rels: &[StoredRelation]) -> String {
    let mut out = String::from("# convention: glued-half-edges\n# kappa: arbarello-cornalba\n");
    for (i, r) in rels.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# provenance: {}", r.provenance.as_str());
        if !r.source.is_empty() {
            let _ = writeln!(out, "# source: {}", r.source);
        }
        out.push_str(&gwi::format_document(&r.relation));
    }
    out
}
