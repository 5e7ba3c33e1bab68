//! Stable cohomology `𝒮`: dimensions from `0 → ℰ → 𝒮 → Σℬ → 0`, trivial extensions
//! `ℰ ⋉ Σ^{1−d}ℰ^∨`, the `E ⋉ T` and Laurent models, graded commutativity, and the action
//! on `Tor` over rings with `𝔪² = 0`.
//!
//! Suspension: `(ΣM)^n = M^{n+1}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::bimodule::{bounded_ext, ActionTable, Bidegree, GradedBimodule};
use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{is_zero_vector, Matrix, Vector};
use crate::resolution::{ext_k_r, lift_to_chain_map, minimal_resolution, ExtAlgebra, ModuleSpec};
use crate::ring::RingPresentation;
use crate::tate::{acyclic_closure, homotopy_lie_basis, TateAlgebra};
use crate::tor::{pi_generators, PiGenerator, TorModule};

/// A finite window of a bigraded algebra, given by structure constants on stored bases.
#[derive(Clone, Debug)]
pub struct AlgebraWindow {
    pub name: String,
    pub field: Field,
    pub dims: BTreeMap<Bidegree, usize>,
    pub labels: BTreeMap<Bidegree, Vec<String>>,
    /// Cohomological degrees whose products are stored.
    pub range: (i64, i64),
    products: HashMap<(Bidegree, usize, Bidegree, usize), Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum CommutativityVerdict {
    Commutative { checked_pairs: usize },
    Witness { a: String, b: String, ab: String, ba_signed: String },
}

impl AlgebraWindow {
    pub fn new(name: &str, field: Field, range: (i64, i64)) -> Self {
        AlgebraWindow {
            name: name.into(),
            field,
            dims: BTreeMap::new(),
            labels: BTreeMap::new(),
            range,
            products: HashMap::new(),
        }
    }

    pub fn dim(&self, b: Bidegree) -> usize {
        self.dims.get(&b).copied().unwrap_or(0)
    }

    pub fn total_by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out: BTreeMap<i64, usize> = (self.range.0..=self.range.1).map(|n| (n, 0)).collect();
        for (&(m, _), &d) in &self.dims {
            *out.entry(m).or_insert(0) += d;
        }
        out
    }

    /// Basis as `(bidegree, index)` in storage order.
    pub fn basis(&self) -> Vec<(Bidegree, usize)> {
        self.dims.iter().flat_map(|(&b, &d)| (0..d).map(move |k| (b, k))).collect()
    }

    pub fn label(&self, b: Bidegree, k: usize) -> &str {
        &self.labels[&b][k]
    }

    pub fn set_product(&mut self, b1: Bidegree, i: usize, b2: Bidegree, j: usize, v: Vector) {
        if !is_zero_vector(&v) {
            self.products.insert((b1, i, b2, j), v);
        }
    }

    fn in_range(&self, m: i64) -> bool {
        m >= self.range.0 && m <= self.range.1
    }

    /// `e_i e_j`, or `None` when the product leaves the window.
    pub fn basis_product(&self, b1: Bidegree, i: usize, b2: Bidegree, j: usize) -> Option<Vector> {
        let b = (b1.0 + b2.0, b1.1 + b2.1);
        if !self.in_range(b.0) {
            return None;
        }
        Some(
            self.products
                .get(&(b1, i, b2, j))
                .cloned()
                .unwrap_or_else(|| vec![self.field.zero(); self.dim(b)]),
        )
    }

    pub fn multiply(&self, b1: Bidegree, v1: &[Scalar], b2: Bidegree, v2: &[Scalar]) -> Option<(Bidegree, Vector)> {
        let b = (b1.0 + b2.0, b1.1 + b2.1);
        if !self.in_range(b.0) {
            return None;
        }
        let mut out = vec![self.field.zero(); self.dim(b)];
        for (i, x) in v1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in v2.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                if let Some(p) = self.products.get(&(b1, i, b2, j)) {
                    let c = x * y;
                    for (o, z) in out.iter_mut().zip(p) {
                        *o += &(&c * z);
                    }
                }
            }
        }
        Some((b, out))
    }

    pub fn vector_string(&self, b: Bidegree, v: &[Scalar]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let l = self.label(b, k);
                if c.is_one() {
                    l.to_string()
                } else {
                    format!("{c}*{l}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// `ab = (−1)^{|a||b|} ba` on all basis pairs whose products stay in the window.
    pub fn commutativity_check(&self) -> CommutativityVerdict {
        let basis = self.basis();
        let mut checked = 0;
        for (x, &(b1, i)) in basis.iter().enumerate() {
            for &(b2, j) in &basis[x..] {
                let (Some(ab), Some(ba)) = (self.basis_product(b1, i, b2, j), self.basis_product(b2, j, b1, i)) else {
                    continue;
                };
                let sign = self.field.sign(b1.0 * b2.0);
                let ba: Vector = ba.iter().map(|c| c * &sign).collect();
                checked += 1;
                if ab != ba {
                    let b = (b1.0 + b2.0, b1.1 + b2.1);
                    return CommutativityVerdict::Witness {
                        a: self.label(b1, i).into(),
                        b: self.label(b2, j).into(),
                        ab: self.vector_string(b, &ab),
                        ba_signed: self.vector_string(b, &ba),
                    };
                }
            }
        }
        CommutativityVerdict::Commutative { checked_pairs: checked }
    }

    /// `(ab)c = a(bc)` on all basis triples inside the window; returns the number checked.
    pub fn associativity_check(&self) -> Result<usize> {
        let basis = self.basis();
        let mut count = 0;
        for &(b1, i) in &basis {
            for &(b2, j) in &basis {
                let Some(ab) = self.basis_product(b1, i, b2, j) else { continue };
                let b12 = (b1.0 + b2.0, b1.1 + b2.1);
                for &(b3, k) in &basis {
                    let e3 = unit_vector(self.field, self.dim(b3), k);
                    let Some((_, left)) = self.multiply(b12, &ab, b3, &e3) else { continue };
                    let Some(bc) = self.basis_product(b2, j, b3, k) else { continue };
                    let e1 = unit_vector(self.field, self.dim(b1), i);
                    let (_, right) = self.multiply(b1, &e1, (b2.0 + b3.0, b2.1 + b3.1), &bc).expect("same target");
                    if left != right {
                        return Err(Error::ConventionViolation(format!(
                            "({}·{})·{} ≠ {}·({}·{})",
                            self.label(b1, i),
                            self.label(b2, j),
                            self.label(b3, k),
                            self.label(b1, i),
                            self.label(b2, j),
                            self.label(b3, k)
                        )));
                    }
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// The algebra as a bimodule over itself, acting through the given elements.
    pub fn regular_bimodule(&self, actors: &[(String, Bidegree, Vector)]) -> GradedBimodule {
        let table = |name: &str, ab: Bidegree, av: &Vector, left: bool| ActionTable {
            actor: name.into(),
            degree: ab.0,
            internal: ab.1,
            blocks: self
                .dims
                .iter()
                .filter(|(&b, _)| self.in_range(b.0 + ab.0))
                .map(|(&b, &d)| {
                    let t = (b.0 + ab.0, b.1 + ab.1);
                    let cols: Vec<Vector> = (0..d)
                        .map(|k| {
                            let e = unit_vector(self.field, d, k);
                            let r = if left { self.multiply(ab, av, b, &e) } else { self.multiply(b, &e, ab, av) };
                            r.expect("in range").1
                        })
                        .collect();
                    (b, Matrix::from_columns(self.field, self.dim(t), &cols))
                })
                .collect(),
        };
        GradedBimodule {
            name: self.name.clone(),
            field: self.field,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
            left: actors.iter().map(|(n, b, v)| table(n, *b, v, true)).collect(),
            right: actors.iter().map(|(n, b, v)| table(n, *b, v, false)).collect(),
            incomplete: BTreeSet::new(),
            range: self.range,
            zero_above: None,
            notes: Vec::new(),
        }
    }
}

fn unit_vector(field: Field, d: usize, k: usize) -> Vector {
    let mut v = vec![field.zero(); d];
    v[k] = field.one();
    v
}

fn vector_of(field: Field, coords: &[Scalar]) -> Vector {
    if coords.is_empty() {
        Vec::new()
    } else {
        let _ = field;
        coords.to_vec()
    }
}

/// `ℰ = Ext_R(k,k)` through cohomological degree `max`, basis dual to the DP monomials of
/// the acyclic closure, products by the Yoneda composition.
pub fn ext_window(alg: &TateAlgebra, max: usize) -> Result<(AlgebraWindow, ExtAlgebra)> {
    if alg.top() < max {
        return Err(Error::Truncation {
            requested: max,
            bound: alg.top(),
        });
    }
    let ext = alg.ext_algebra();
    let field = alg.field();
    let mut w = AlgebraWindow::new("E", field, (0, max as i64));
    for ((n, s), d) in ext.dims() {
        if n > max || d == 0 {
            continue;
        }
        let labels = ext
            .basis(n, s)
            .iter()
            .map(|&j| format!("{}^∨", alg.monomial_label(&alg.monomials(n)[j])))
            .collect();
        w.dims.insert((n as i64, s), d);
        w.labels.insert((n as i64, s), labels);
    }
    let basis = w.basis();
    for &(b2, j) in &basis {
        let c2 = ext.basis_class(b2.0 as usize, b2.1, j);
        let depth = max - b2.0 as usize;
        let lift = ext.lift(&c2, depth)?;
        for &(b1, i) in &basis {
            let n = (b1.0 + b2.0) as usize;
            if n > max {
                continue;
            }
            let c1 = ext.basis_class(b1.0 as usize, b1.1, i);
            let p = ext.compose_with_lift(&c1, &lift, n, b1.1 + b2.1);
            w.set_product(b1, i, b2, j, vector_of(field, &p.coords));
        }
    }
    Ok((w, ext))
}

/// How a word `g_1⋯g_r` of π generators acts on the right of `Tor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WordOrder {
    /// `z·(g_1⋯g_r) = (⋯(z·g_1)⋯)·g_r`
    Forward,
    /// `z·(g_1⋯g_r) = (⋯(z·g_r)⋯)·g_1`
    Reversed,
    /// As `Reversed`, with the Koszul sign of the reversal.
    ReversedSigned,
}

/// Every basis element of an `ℰ` window as a combination of words in π generators.
#[derive(Clone, Debug)]
pub struct WordExpansion {
    pub generators: Vec<PiGenerator>,
    /// Classes of the generators in the window.
    pub classes: Vec<(Bidegree, Vector)>,
    /// Per bidegree: the words, and for each basis element its coefficients on them.
    pub words: BTreeMap<Bidegree, (Vec<Vec<usize>>, Vec<Vector>)>,
    /// Linear relations among the word classes, per bidegree.
    pub relations: BTreeMap<Bidegree, Vec<Vector>>,
}

pub fn word_expansion(window: &AlgebraWindow, ext: &ExtAlgebra, alg: &TateAlgebra, generators: Vec<PiGenerator>) -> Result<WordExpansion> {
    let field = window.field;
    let classes: Vec<(Bidegree, Vector)> = generators
        .iter()
        .map(|g| {
            let c = g.derivation.ext_class(alg, ext);
            ((c.degree as i64, c.internal), c.coords)
        })
        .collect();
    // word → (bidegree, class)
    let mut all: BTreeMap<Bidegree, Vec<(Vec<usize>, Vector)>> = BTreeMap::new();
    let mut frontier: Vec<(Vec<usize>, Bidegree, Vector)> = vec![(Vec::new(), (0, 0), vec![field.one()])];
    all.entry((0, 0)).or_default().push((Vec::new(), vec![field.one()]));
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, b, v) in &frontier {
            for (g, (gb, gv)) in classes.iter().enumerate() {
                let Some((nb, nv)) = window.multiply(*b, v, *gb, gv) else { continue };
                let mut nw = w.clone();
                nw.push(g);
                all.entry(nb).or_default().push((nw.clone(), nv.clone()));
                next.push((nw, nb, nv));
            }
        }
        frontier = next;
    }
    let mut words = BTreeMap::new();
    let mut relations = BTreeMap::new();
    for (&b, &d) in &window.dims {
        let entries = all.remove(&b).unwrap_or_default();
        let m = Matrix::from_columns(field, d, &entries.iter().map(|e| e.1.clone()).collect::<Vec<_>>());
        if m.rank() < d {
            return Err(Error::Inconclusive(format!(
                "words in the π generators do not span ℰ in bidegree {b:?}"
            )));
        }
        let coeffs = (0..d)
            .map(|k| m.solve_linear(&unit_vector(field, d, k)).map(|x| x.expect("spanning")))
            .collect::<Result<Vec<_>>>()?;
        relations.insert(b, m.kernel_basis()?);
        words.insert(b, (entries.into_iter().map(|e| e.0).collect(), coeffs));
    }
    Ok(WordExpansion {
        generators,
        classes,
        words,
        relations,
    })
}

impl WordExpansion {
    fn word_action(&self, tor: &TorModule, order: WordOrder, word: &[usize], n: usize, t: i64, v: &[Scalar]) -> Result<Vector> {
        let field = tor.field();
        let mut seq: Vec<usize> = word.to_vec();
        let mut sign = field.one();
        if order != WordOrder::Forward {
            seq.reverse();
        }
        if order == WordOrder::ReversedSigned {
            let degs: Vec<usize> = word.iter().map(|&g| self.generators[g].chain.shift).collect();
            let mut e = 0;
            for a in 0..degs.len() {
                for b in a + 1..degs.len() {
                    e += degs[a] * degs[b];
                }
            }
            sign = field.sign(e as i64);
        }
        let mut z = tor.class(n, t, v.to_vec());
        for &g in &seq {
            z = tor.right_action_chain(&z, &self.generators[g].chain)?;
        }
        let (n2, t2) = word.iter().fold((n as i64, t), |(a, b), &g| {
            (a - self.generators[g].chain.shift as i64, b - self.generators[g].chain.internal)
        });
        if n2 < 0 {
            return Ok(Vec::new());
        }
        let len = tor.dim(n2 as usize, t2);
        if z.coords.len() != len {
            return Ok(vec![field.zero(); len]);
        }
        Ok(z.coords.iter().map(|c| c * &sign).collect())
    }

    /// The first word order under which every relation among word classes acts by zero on
    /// every `Tor` basis class in range.
    pub fn consistent_order(&self, tor: &TorModule) -> Result<WordOrder> {
        'orders: for order in [WordOrder::Forward, WordOrder::Reversed, WordOrder::ReversedSigned] {
            for (b, rels) in &self.relations {
                let (ws, _) = &self.words[b];
                for ((n, t), d) in tor.dims() {
                    if (n as i64) < b.0 {
                        continue;
                    }
                    for k in 0..d {
                        let e = unit_vector(tor.field(), d, k);
                        let imgs = ws
                            .iter()
                            .map(|w| self.word_action(tor, order, w, n, t, &e))
                            .collect::<Result<Vec<_>>>()?;
                        for r in rels {
                            let len = imgs.first().map_or(0, Vec::len);
                            let mut acc = vec![tor.field().zero(); len];
                            for (c, img) in r.iter().zip(&imgs) {
                                for (a, x) in acc.iter_mut().zip(img) {
                                    *a += &(c * x);
                                }
                            }
                            if !is_zero_vector(&acc) {
                                continue 'orders;
                            }
                        }
                    }
                }
            }
            return Ok(order);
        }
        Err(Error::ConventionViolation(
            "no word order makes the right π action factor through ℰ".into(),
        ))
    }

    /// Right action of the basis element `k` of `ℰ^b` on `Tor_{n,t}`, as a matrix.
    pub fn right_matrix(&self, tor: &TorModule, order: WordOrder, b: Bidegree, k: usize, n: usize, t: i64) -> Result<Matrix> {
        let field = tor.field();
        let (ws, coeffs) = &self.words[&b];
        let rows = if n as i64 >= b.0 { tor.dim(n - b.0 as usize, t - b.1) } else { 0 };
        let d = tor.dim(n, t);
        let mut cols = vec![vec![field.zero(); rows]; d];
        for (w, c) in ws.iter().zip(&coeffs[k]) {
            if c.is_zero() {
                continue;
            }
            for (q, col) in cols.iter_mut().enumerate() {
                let img = self.word_action(tor, order, w, n, t, &unit_vector(field, d, q))?;
                for (a, x) in col.iter_mut().zip(&img) {
                    *a += &(c * x);
                }
            }
        }
        Ok(Matrix::from_columns(field, rows, &cols))
    }
}

/// π generators of degrees 1 and 2 (enough for complete intersections), adding higher
/// degrees until words span the window.
pub fn ext_generators(alg: &TateAlgebra, window: &AlgebraWindow, ext: &ExtAlgebra) -> Result<WordExpansion> {
    let mut gens = pi_generators(alg, 1)?;
    let top = window.range.1.max(1) as usize;
    let mut deg = 2;
    loop {
        if deg <= top {
            gens.extend(pi_generators(alg, deg)?);
        }
        match word_expansion(window, ext, alg, gens.clone()) {
            Ok(w) => return Ok(w),
            Err(Error::Inconclusive(_)) if deg < top => deg += 1,
            Err(e) => return Err(e),
        }
    }
}

/// `Tor^R(k,k)` as an `ℰ`-bimodule with one left and one right table per basis element of
/// the window (left through chain lifts, right through words in π generators).
pub fn tor_ext_bimodule(tor: &TorModule, window: &AlgebraWindow, words: &WordExpansion, order: WordOrder) -> Result<GradedBimodule> {
    let ext = tor.tate().ext_algebra();
    let field = tor.field();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (b, k) in window.basis() {
        let class = ext.basis_class(b.0 as usize, b.1, k);
        let lift = ext.lift(&class, tor.top().saturating_sub(b.0 as usize))?;
        let mut lb = BTreeMap::new();
        let mut rb = BTreeMap::new();
        for ((n, t), _) in tor.dims() {
            if (n as i64) < b.0 {
                continue;
            }
            let key = (-(n as i64), -t);
            lb.insert(key, tor.left_matrix(&lift, n, t)?);
            rb.insert(key, words.right_matrix(tor, order, b, k, n, t)?);
        }
        let name = window.label(b, k).to_string();
        left.push(ActionTable {
            actor: name.clone(),
            degree: b.0,
            internal: b.1,
            blocks: lb,
        });
        right.push(ActionTable {
            actor: name,
            degree: b.0,
            internal: b.1,
            blocks: rb,
        });
    }
    let mut dims = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for ((n, t), d) in tor.dims() {
        dims.insert((-(n as i64), -t), d);
        labels.insert((-(n as i64), -t), tor.basis_labels(n, t));
    }
    let top = tor.top() as i64;
    Ok(GradedBimodule {
        name: "Tor".into(),
        field,
        dims,
        labels,
        left,
        right,
        incomplete: if tor.truncated { (-top..=0).collect() } else { BTreeSet::new() },
        range: (-top, 0),
        zero_above: Some(0),
        notes: Vec::new(),
    })
}

/// `A ⋉ M` with `(a,m)(b,n) = (ab, an + mb)`.
#[derive(Clone, Debug)]
pub struct TrivialExtension {
    pub algebra: AlgebraWindow,
    /// Per bidegree, how many leading basis elements come from `A`.
    pub base_dims: BTreeMap<Bidegree, usize>,
    pub module_dims: BTreeMap<Bidegree, usize>,
    /// Number of bimodule-axiom instances verified before building.
    pub verified: usize,
}

fn table_apply(m: &GradedBimodule, t: &ActionTable, b: Bidegree, v: &[Scalar]) -> Option<(Bidegree, Vector)> {
    let tb = t.target(b);
    match t.blocks.get(&b) {
        Some(mat) => Some((tb, mat.mul_vec(v).expect("shape"))),
        None if m.dim(tb) == 0 && m.is_known(tb.0) => Some((tb, Vec::new())),
        None => None,
    }
}

/// Builds `A ⋉ M`; `M` must carry one left and one right table per basis element of `A`, in
/// basis order. The bimodule axioms are checked on every triple inside the window.
pub fn trivial_extension(a: &AlgebraWindow, m: &GradedBimodule) -> Result<TrivialExtension> {
    let field = a.field;
    let basis = a.basis();
    if m.left.len() != basis.len() || m.right.len() != basis.len() {
        return Err(Error::Precondition(
            "the module must carry an action table for every basis element of the algebra".into(),
        ));
    }
    let index: HashMap<(Bidegree, usize), usize> = basis.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let act = |tables: &[ActionTable], ab: Bidegree, av: &[Scalar], mb: Bidegree, mv: &[Scalar]| -> Option<(Bidegree, Vector)> {
        let tb = (ab.0 + mb.0, ab.1 + mb.1);
        let mut out = vec![field.zero(); m.dim(tb)];
        for (k, c) in av.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (_, img) = table_apply(m, &tables[index[&(ab, k)]], mb, mv)?;
            for (o, x) in out.iter_mut().zip(&img) {
                *o += &(c * x);
            }
        }
        Some((tb, out))
    };
    let range = (a.range.0.min(m.range.0), a.range.1);
    let in_range = |x: i64| x >= range.0 && x <= range.1;
    let mut verified = 0;
    // (ab)·μ = a·(b·μ), μ·(ab) = (μ·a)·b, (a·μ)·b = a·(μ·b)
    for &(b1, i) in &basis {
        let e1 = unit_vector(field, a.dim(b1), i);
        for &(b2, j) in &basis {
            let e2 = unit_vector(field, a.dim(b2), j);
            let prod = a.multiply(b1, &e1, b2, &e2);
            for (&mb, &d) in &m.dims {
                for q in 0..d {
                    let mu = unit_vector(field, d, q);
                    let mut check = |x: Option<(Bidegree, Vector)>, y: Option<(Bidegree, Vector)>, what: &str| -> Result<()> {
                        if let (Some((bx, x)), Some((_, y))) = (x, y) {
                            if !in_range(bx.0) || !m.is_known(bx.0) {
                                return Ok(());
                            }
                            if x != y {
                                return Err(Error::Precondition(format!(
                                    "bimodule axiom {what} fails for {}, {} on {}",
                                    a.label(b1, i),
                                    a.label(b2, j),
                                    m.labels[&mb][q]
                                )));
                            }
                            verified += 1;
                        }
                        Ok(())
                    };
                    let inner = act(&m.left, b2, &e2, mb, &mu);
                    let lhs = prod.as_ref().and_then(|(pb, pv)| act(&m.left, *pb, pv, mb, &mu));
                    let rhs = inner.and_then(|(ib, iv)| act(&m.left, b1, &e1, ib, &iv));
                    check(lhs, rhs, "(ab)μ = a(bμ)")?;
                    let right = |ab: Bidegree, av: &[Scalar], xb: Bidegree, xv: &[Scalar]| act(&m.right, ab, av, xb, xv);
                    let lhs = prod.as_ref().and_then(|(pb, pv)| right(*pb, pv, mb, &mu));
                    let rhs = right(b1, &e1, mb, &mu).and_then(|(xb, xv)| right(b2, &e2, xb, &xv));
                    check(lhs, rhs, "μ(ab) = (μa)b")?;
                    let lhs = act(&m.left, b1, &e1, mb, &mu).and_then(|(xb, xv)| right(b2, &e2, xb, &xv));
                    let rhs = right(b2, &e2, mb, &mu).and_then(|(xb, xv)| act(&m.left, b1, &e1, xb, &xv));
                    check(lhs, rhs, "(aμ)b = a(μb)")?;
                }
            }
        }
    }
    // the extension itself
    let mut te = AlgebraWindow::new(&format!("{}⋉{}", a.name, m.name), field, range);
    let mut base_dims = BTreeMap::new();
    let mut module_dims = BTreeMap::new();
    let keys: BTreeSet<Bidegree> = a.dims.keys().chain(m.dims.keys()).copied().filter(|b| in_range(b.0)).collect();
    for &b in &keys {
        let (da, dm) = (a.dim(b), m.dim(b));
        if da + dm == 0 {
            continue;
        }
        let mut labels: Vec<String> = a.labels.get(&b).cloned().unwrap_or_default();
        labels.extend(m.labels.get(&b).cloned().unwrap_or_default());
        te.dims.insert(b, da + dm);
        te.labels.insert(b, labels);
        base_dims.insert(b, da);
        module_dims.insert(b, dm);
    }
    let embed = |b: Bidegree, v: &[Scalar], module: bool| -> Vector {
        let (da, dm) = (a.dim(b), m.dim(b));
        let mut out = vec![field.zero(); da + dm];
        let off = if module { da } else { 0 };
        for (k, x) in v.iter().enumerate() {
            out[off + k] = x.clone();
        }
        out
    };
    let te_basis: Vec<(Bidegree, usize)> = te.basis();
    for &(b1, i) in &te_basis {
        for &(b2, j) in &te_basis {
            let b = (b1.0 + b2.0, b1.1 + b2.1);
            if !in_range(b.0) {
                continue;
            }
            let (a1, a2) = (a.dim(b1), a.dim(b2));
            let v = match (i < a1, j < a2) {
                (true, true) => a.basis_product(b1, i, b2, j).map(|v| embed(b, &v, false)),
                (true, false) => {
                    let mu = unit_vector(field, m.dim(b2), j - a2);
                    act(&m.left, b1, &unit_vector(field, a1, i), b2, &mu).map(|(_, v)| embed(b, &v, true))
                }
                (false, true) => {
                    let mu = unit_vector(field, m.dim(b1), i - a1);
                    act(&m.right, b2, &unit_vector(field, a2, j), b1, &mu).map(|(_, v)| embed(b, &v, true))
                }
                (false, false) => None,
            };
            if let Some(v) = v {
                if v.len() == te.dim(b) {
                    te.set_product(b1, i, b2, j, v);
                }
            }
        }
    }
    Ok(TrivialExtension {
        algebra: te,
        base_dims,
        module_dims,
        verified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StableRow {
    pub degree: i64,
    pub ext: usize,
    pub suspended_bounded: usize,
    pub total: usize,
    pub incomplete: bool,
}

/// `dim 𝒮^n = dim ℰ^n + dim ℬ^{n+1}` for `|n| ≤ window`.
pub fn stable_dims(ring: &Arc<RingPresentation>, window: usize) -> Result<Vec<StableRow>> {
    let class = ring.classify()?;
    if class.codimension == Some(0) {
        return Err(Error::Precondition(
            "the ring is regular, so its stable cohomology vanishes".into(),
        ));
    }
    let w = window as i64;
    let top = window + 2;
    let alg = Arc::new(acyclic_closure(ring, top)?);
    let tor = TorModule::residue(alg.clone(), top)?;
    let bounded = bounded_ext(&tor, &[], -w + 1, w + 1)?;
    let ext_dims = alg.ext_algebra().dims();
    let btot = bounded.total_by_degree();
    Ok((-w..=w)
        .map(|n| {
            let e: usize = if n >= 0 {
                ext_dims.iter().filter(|((p, _), _)| *p as i64 == n).map(|(_, d)| d).sum()
            } else {
                0
            };
            let b = btot.get(&(n + 1)).copied().unwrap_or(0);
            StableRow {
                degree: n,
                ext: e,
                suspended_bounded: b,
                total: e + b,
                incomplete: bounded.incomplete.contains(&(n + 1)) || alg.truncated,
            }
        })
        .collect())
}

/// `Λ(ξ_1..ξ_e) ⊗ k[t, t⁻¹]`, `|ξ| = 1`, `|t| = 2`, central.
#[derive(Clone, Debug)]
pub struct LaurentModel {
    pub rank: usize,
    pub algebra: AlgebraWindow,
    /// The products describe `𝒮` only when the relation lies in `𝔪³`; otherwise `𝒮` is the
    /// central localization of a non-commutative `ℰ` and the model gives dimensions only.
    pub products_valid: bool,
}

fn subsets(e: usize) -> Vec<Vec<usize>> {
    (0..1u32 << e).map(|m| (0..e).filter(|i| m & (1 << i) != 0).collect()).collect()
}

/// Sign and union of `ξ_S ∧ ξ_T`, or `None` if they meet.
fn wedge(s: &[usize], t: &[usize]) -> Option<(i64, Vec<usize>)> {
    if s.iter().any(|x| t.contains(x)) {
        return None;
    }
    let inversions = s.iter().map(|a| t.iter().filter(|b| *b < a).count()).sum::<usize>();
    let mut u: Vec<usize> = s.iter().chain(t).copied().collect();
    u.sort_unstable();
    Some((inversions as i64, u))
}

fn exterior_label(sym: &str, s: &[usize]) -> String {
    s.iter().map(|i| format!("{sym}{}", i + 1)).collect::<Vec<_>>().join("*")
}

fn join_labels(parts: &[String]) -> String {
    let parts: Vec<&String> = parts.iter().filter(|p| !p.is_empty()).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("*")
    }
}

/// `t` has internal degree `h` (the degree of the defining equation), `ξ_i` internal 1.
pub fn laurent_model(rank: usize, h: i64, window: usize, field: Field) -> LaurentModel {
    let w = window as i64;
    let mut alg = AlgebraWindow::new("Λπ¹⊗k[t,t⁻¹]", field, (-w, w));
    let mut basis: BTreeMap<Bidegree, Vec<(Vec<usize>, i64)>> = BTreeMap::new();
    for s in subsets(rank) {
        for k in -w..=w {
            let n = s.len() as i64 + 2 * k;
            if n.abs() <= w {
                basis.entry((n, s.len() as i64 + k * h)).or_default().push((s.clone(), k));
            }
        }
    }
    for (b, v) in &basis {
        alg.dims.insert(*b, v.len());
        alg.labels.insert(
            *b,
            v.iter()
                .map(|(s, k)| {
                    let t = match k {
                        0 => String::new(),
                        1 => "t".into(),
                        k => format!("t^{k}"),
                    };
                    join_labels(&[exterior_label("ξ", s), t])
                })
                .collect(),
        );
    }
    for (b1, v1) in &basis {
        for (i, (s1, k1)) in v1.iter().enumerate() {
            for (b2, v2) in &basis {
                for (j, (s2, k2)) in v2.iter().enumerate() {
                    let b = (b1.0 + b2.0, b1.1 + b2.1);
                    let Some((sg, u)) = wedge(s1, s2) else { continue };
                    let Some(target) = basis.get(&b) else { continue };
                    let Some(pos) = target.iter().position(|(s, k)| *s == u && *k == k1 + k2) else { continue };
                    let mut v = vec![field.zero(); target.len()];
                    v[pos] = field.sign(sg);
                    alg.set_product(*b1, i, *b2, j, v);
                }
            }
        }
    }
    LaurentModel {
        rank,
        algebra: alg,
        products_valid: true,
    }
}

/// `E = Λ(ξ_1..ξ_e) ⊗ Sym(χ_1..χ_c)` with `T = Λ(x_1..x_e) ⊗ Γ(y_1..y_c)` as an `E`-bimodule.
#[derive(Clone, Debug)]
pub struct ModelET {
    pub e: usize,
    pub c: usize,
    pub algebra: AlgebraWindow,
    pub module: GradedBimodule,
    /// Actions of the generators `ξ_j, χ_j` on `T`, left then right.
    pub generator_tables: Vec<ActionTable>,
}

type ETBasis = (Vec<usize>, Vec<u32>);

fn et_label(sym_odd: &str, sym_even: &str, divided: bool, (s, a): &ETBasis) -> String {
    let even: Vec<String> = a
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| match (k, divided) {
            (1, _) => format!("{sym_even}{}", i + 1),
            (k, true) => format!("{sym_even}{}^({k})", i + 1),
            (k, false) => format!("{sym_even}{}^{k}", i + 1),
        })
        .collect();
    join_labels(&[exterior_label(sym_odd, s), even.join("*")])
}

fn exponent_vectors(c: usize, total: u32) -> Vec<Vec<u32>> {
    if c == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .rev()
        .flat_map(|k| {
            exponent_vectors(c - 1, total - k).into_iter().map(move |mut r| {
                r.insert(0, k);
                r
            })
        })
        .collect()
}

/// Bases per bidegree; `ξ_i`/`x_i` have internal degree 1 and `χ_j`/`y_j` internal `h_j`.
fn et_bases(e: usize, h: &[i64], window: usize, sign: i64) -> BTreeMap<Bidegree, Vec<ETBasis>> {
    let mut out: BTreeMap<Bidegree, Vec<ETBasis>> = BTreeMap::new();
    for n in 0..=window {
        for s in subsets(e) {
            if s.len() > n || (n - s.len()) % 2 == 1 {
                continue;
            }
            for a in exponent_vectors(h.len(), ((n - s.len()) / 2) as u32) {
                let internal = s.len() as i64 + a.iter().zip(h).map(|(&k, &hj)| k as i64 * hj).sum::<i64>();
                out.entry((sign * n as i64, sign * internal)).or_default().push((s.clone(), a));
            }
        }
    }
    out
}

pub fn build_model_et(e: usize, relation_degrees: &[i64], window: usize, field: Field) -> ModelET {
    let c = relation_degrees.len();
    let ebasis = et_bases(e, relation_degrees, window, 1);
    let tbasis = et_bases(e, relation_degrees, window, -1);
    let mut alg = AlgebraWindow::new("E", field, (0, window as i64));
    for (b, v) in &ebasis {
        alg.dims.insert(*b, v.len());
        alg.labels.insert(*b, v.iter().map(|x| et_label("ξ", "χ", false, x)).collect());
    }
    let find = |map: &BTreeMap<Bidegree, Vec<ETBasis>>, b: Bidegree, x: &ETBasis| {
        map.get(&b).and_then(|v| v.iter().position(|y| y == x))
    };
    for (b1, v1) in &ebasis {
        for (i, (s1, a1)) in v1.iter().enumerate() {
            for (b2, v2) in &ebasis {
                for (j, (s2, a2)) in v2.iter().enumerate() {
                    let b = (b1.0 + b2.0, b1.1 + b2.1);
                    if b.0 > window as i64 {
                        continue;
                    }
                    let Some((sg, u)) = wedge(s1, s2) else { continue };
                    let a: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                    let pos = find(&ebasis, b, &(u, a)).expect("closed");
                    let mut v = vec![field.zero(); alg.dim(b)];
                    v[pos] = field.sign(sg);
                    alg.set_product(*b1, i, *b2, j, v);
                }
            }
        }
    }
    // generator actions on T: ξ_j contracts x_j (left −, right +), χ_j lowers y_j^(k) (−)
    let gen_table = |name: String, degree: i64, internal: i64, f: &dyn Fn(&ETBasis) -> Option<(i64, ETBasis)>| ActionTable {
        actor: name,
        degree,
        internal,
        blocks: tbasis
            .iter()
            .map(|(&b, v)| {
                let tb = (b.0 + degree, b.1 + internal);
                let rows = tbasis.get(&tb).map_or(0, Vec::len);
                let cols: Vec<Vector> = v
                    .iter()
                    .map(|x| {
                        let mut col = vec![field.zero(); rows];
                        if let Some((sg, y)) = f(x) {
                            let pos = find(&tbasis, tb, &y).expect("closed");
                            col[pos] = field.sign(sg);
                        }
                        col
                    })
                    .collect();
                (b, Matrix::from_columns(field, rows, &cols))
            })
            .collect(),
    };
    let mut left_gens = Vec::new();
    let mut right_gens = Vec::new();
    for j in 0..e {
        let lf = move |(s, a): &ETBasis| {
            let p = s.iter().position(|&x| x == j)?;
            let mut s2 = s.clone();
            s2.remove(p);
            Some((1 + p as i64, (s2, a.clone())))
        };
        let rf = move |(s, a): &ETBasis| {
            let p = s.iter().position(|&x| x == j)?;
            let mut s2 = s.clone();
            s2.remove(p);
            Some(((s.len() - 1 - p) as i64, (s2, a.clone())))
        };
        left_gens.push(gen_table(format!("ξ{}", j + 1), 1, 1, &lf));
        right_gens.push(gen_table(format!("ξ{}", j + 1), 1, 1, &rf));
    }
    for (j, &hj) in relation_degrees.iter().enumerate() {
        let f = move |(s, a): &ETBasis| {
            if a[j] == 0 {
                return None;
            }
            let mut a2 = a.clone();
            a2[j] -= 1;
            Some((1, (s.clone(), a2)))
        };
        left_gens.push(gen_table(format!("χ{}", j + 1), 2, hj, &f));
        right_gens.push(gen_table(format!("χ{}", j + 1), 2, hj, &f));
    }
    // all of E acts by composing generator actions along ξ_S χ^a
    let compose = |gens: &[ActionTable], left: bool| -> Vec<ActionTable> {
        alg.basis()
            .into_iter()
            .map(|(b, k)| {
                let (s, a) = &ebasis[&b][k];
                let mut seq: Vec<usize> = s.clone();
                for (j, &m) in a.iter().enumerate() {
                    seq.extend(std::iter::repeat_n(e + j, m as usize));
                }
                if left {
                    seq.reverse();
                }
                let blocks = tbasis
                    .iter()
                    .map(|(&tb, v)| {
                        let mut cur = tb;
                        let mut mat = Matrix::identity(field, v.len());
                        for &g in &seq {
                            let t = &gens[g];
                            let next = t.target(cur);
                            let rows = tbasis.get(&next).map_or(0, Vec::len);
                            mat = match t.blocks.get(&cur) {
                                Some(block) if mat.rows() > 0 => block.mul(&mat).expect("shape"),
                                _ => Matrix::zeros(field, rows, v.len()),
                            };
                            cur = next;
                        }
                        (tb, mat)
                    })
                    .collect();
                ActionTable {
                    actor: alg.label(b, k).to_string(),
                    degree: b.0,
                    internal: b.1,
                    blocks,
                }
            })
            .collect()
    };
    let left = compose(&left_gens, true);
    let right = compose(&right_gens, false);
    let module = GradedBimodule {
        name: "T".into(),
        field,
        dims: tbasis.iter().map(|(&b, v)| (b, v.len())).collect(),
        labels: tbasis
            .iter()
            .map(|(&b, v)| (b, v.iter().map(|x| et_label("x", "y", true, x)).collect()))
            .collect(),
        left,
        right,
        incomplete: BTreeSet::new(),
        range: (-(window as i64), 0),
        zero_above: Some(0),
        notes: Vec::new(),
    };
    let mut generator_tables = left_gens;
    generator_tables.extend(right_gens);
    ModelET {
        e,
        c,
        algebra: alg,
        module,
        generator_tables,
    }
}

impl ModelET {
    pub fn left_generator(&self, name: &str) -> Option<&ActionTable> {
        self.generator_tables[..self.generator_tables.len() / 2].iter().find(|t| t.actor == name)
    }

    pub fn right_generator(&self, name: &str) -> Option<&ActionTable> {
        self.generator_tables[self.generator_tables.len() / 2..].iter().find(|t| t.actor == name)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelComparison {
    pub dims_equal: bool,
    /// Generator action entries compared (left and right, every bidegree).
    pub entries_compared: usize,
    pub mismatches: Vec<String>,
}

impl ModelComparison {
    pub fn agrees(&self) -> bool {
        self.dims_equal && self.mismatches.is_empty()
    }
}

/// Compares `T` with `Tor^R(k,k)` under `T_i ↦ x_i`, `S_j ↦ y_j`, including the actions of
/// `ξ_j, χ_j` against the closed-form π generators on both sides.
pub fn compare_model_with_tor(model: &ModelET, tor: &TorModule) -> Result<ModelComparison> {
    let alg = tor.tate();
    if !alg.is_explicit_ci() {
        return Err(Error::Precondition("the E ⋉ T model needs a complete intersection".into()));
    }
    let field = tor.field();
    let rename = |l: &str| l.replace('T', "x").replace('S', "y");
    let mut mismatches = Vec::new();
    let mut dims_equal = true;
    // position of each Tor basis element in the model basis
    let mut perm: BTreeMap<Bidegree, Vec<usize>> = BTreeMap::new();
    for ((n, t), d) in tor.dims() {
        let b = (-(n as i64), -t);
        let labels = model.module.labels.get(&b).cloned().unwrap_or_default();
        if labels.len() != d {
            dims_equal = false;
            mismatches.push(format!("dimension at {b:?}: Tor {d}, T {}", labels.len()));
            continue;
        }
        let mut p = Vec::new();
        for l in tor.basis_labels(n, t) {
            match labels.iter().position(|m| *m == rename(&l)) {
                Some(k) => p.push(k),
                None => {
                    mismatches.push(format!("no model element for {l}"));
                    dims_equal = false;
                }
            }
        }
        perm.insert(b, p);
    }
    for (b, &d) in &model.module.dims {
        if -b.0 <= tor.top() as i64 && tor.dim((-b.0) as usize, -b.1) != d {
            dims_equal = false;
        }
    }
    if !dims_equal {
        return Ok(ModelComparison { dims_equal, entries_compared: 0, mismatches });
    }
    let mut compared = 0;
    for deg in 1..=2.min(tor.top()) {
        for g in pi_generators(alg, deg)? {
            let tables = [(true, model.left_generator(&g.name)), (false, model.right_generator(&g.name))];
            for (left, table) in tables {
                let table = table.ok_or_else(|| Error::Precondition(format!("model lacks {}", g.name)))?;
                for ((n, t), d) in tor.dims() {
                    if n < deg {
                        continue;
                    }
                    let src = (-(n as i64), -t);
                    let tgt = table.target(src);
                    let theirs = if left { tor.left_matrix(&g.chain, n, t)? } else { tor.right_matrix(&g.chain, n, t)? };
                    for q in 0..d {
                        let mine = model.module.act(table, src, &unit_vector(field, d, perm[&src][q])).1;
                        let col: Vector = (0..theirs.rows()).map(|r| theirs.get(r, q).clone()).collect();
                        let mut expected = vec![field.zero(); mine.len()];
                        if let Some(p) = perm.get(&tgt) {
                            for (r, x) in col.iter().enumerate() {
                                expected[p[r]] = x.clone();
                            }
                        }
                        compared += 1;
                        if mine != expected {
                            mismatches.push(format!(
                                "{} {} on {}",
                                if left { "left" } else { "right" },
                                g.name,
                                tor.basis_labels(n, t)[q]
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(ModelComparison {
        dims_equal,
        entries_compared: compared,
        mismatches,
    })
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum StableModel {
    TrivialExtension {
        extension: TrivialExtension,
        krull_dimension: usize,
        codimension: Option<usize>,
        word_order: WordOrder,
        module: GradedBimodule,
    },
    Laurent(LaurentModel),
}

/// The model of `𝒮`: `ℰ ⋉ Σ^{1−d}ℰ^∨` (with `ℰ^∨` realized by `Tor^R(k,k)`) for complete
/// intersections of codimension ≥ 2 or, with `assume_depth2`, Gorenstein rings; the Laurent
/// model for hypersurfaces.
pub fn stable_model(ring: &Arc<RingPresentation>, window: usize, assume_depth2: bool) -> Result<StableModel> {
    let class = ring.classify()?;
    let codim = class.codimension;
    if codim == Some(0) {
        return Err(Error::Precondition(
            "the ring is regular, so its stable cohomology vanishes".into(),
        ));
    }
    if class.is_complete_intersection && codim == Some(1) {
        let h = ring.relations().first().map_or(2, |r| r.degree as i64);
        let mut m = laurent_model(ring.embedding_dimension(), h, window, ring.field());
        m.products_valid = class.in_cube;
        return Ok(StableModel::Laurent(m));
    }
    let eligible = (class.is_complete_intersection && codim.is_some_and(|c| c >= 2)) || (class.is_gorenstein && assume_depth2);
    if !eligible {
        return Err(Error::Precondition(
            "the trivial-extension model needs depth ℰ ≥ 2, known here only for complete \
             intersections of codimension at least 2; pass --assume-depth2 to assert it for a \
             Gorenstein ring"
                .into(),
        ));
    }
    let d = class.krull_dimension.ok_or_else(|| Error::Inconclusive("Krull dimension unknown".into()))?;
    let shift = 1 - d as i64;
    let top = window + d + 1;
    let alg = Arc::new(acyclic_closure(ring, top)?);
    let tor = TorModule::residue(alg.clone(), window + d)?;
    let (ew, ext) = ext_window(&alg, window)?;
    let words = ext_generators(&alg, &ew, &ext)?;
    let order = words.consistent_order(&tor)?;
    let tb = tor_ext_bimodule(&tor, &ew, &words, order)?;
    let module = tb.suspend(shift);
    let mut extension = trivial_extension(&ew, &module)?;
    extension.algebra.range = (-(window as i64), window as i64);
    Ok(StableModel::TrivialExtension {
        extension,
        krull_dimension: d,
        codimension: codim,
        word_order: order,
        module,
    })
}

/// The word resolution of `k` over `k[x_1..x_e]/𝔪²`: `F_w = R ⊗ U^{⊗w}`,
/// `∂(e_{i_1}⊗⋯⊗e_{i_w}) = x_{i_1}·e_{i_2}⊗⋯⊗e_{i_w}`.
pub fn m2zero_word_resolution(ring: &Arc<RingPresentation>, top: usize) -> Result<FreeComplex> {
    let class = ring.classify()?;
    if !class.is_m2_zero {
        return Err(Error::Precondition("the word resolution needs 𝔪² = 0".into()));
    }
    let e = ring.embedding_dimension();
    let field = ring.field();
    let lin: Vec<usize> = (0..e)
        .map(|i| ring.variable(i).iter().position(Scalar::is_one).expect("basis variable"))
        .collect();
    let mut degrees = Vec::new();
    let mut diff = Vec::new();
    let mut labels = Vec::new();
    for w in 0..=top {
        let count = e.pow(w as u32);
        degrees.push(vec![w; count]);
        labels.push((0..count).map(|j| word_label(e, w, j)).collect());
        if w == 0 {
            diff.push(Vec::new());
            continue;
        }
        let prev = e.pow(w as u32 - 1);
        diff.push(
            (0..count)
                .map(|j| {
                    let (first, rest) = (j / prev, j % prev);
                    let mut v = vec![field.zero(); prev * e];
                    v[rest * e + lin[first]] = field.one();
                    v
                })
                .collect(),
        );
    }
    Ok(FreeComplex::new(ring.clone(), degrees, diff).with_labels(labels))
}

/// Word `j` of length `w` as `e_{i_1}⊗⋯⊗e_{i_w}` (most significant letter first).
pub fn word_letters(e: usize, w: usize, j: usize) -> Vec<usize> {
    (0..w).map(|k| (j / e.pow((w - 1 - k) as u32)) % e).collect()
}

pub fn word_index(e: usize, letters: &[usize]) -> usize {
    letters.iter().fold(0, |acc, &l| acc * e + l)
}

pub fn word_label(e: usize, w: usize, j: usize) -> String {
    if w == 0 {
        return "1".into();
    }
    word_letters(e, w, j).iter().map(|l| format!("e{}", l + 1)).collect::<Vec<_>>().join("⊗")
}

/// `z̄·y_i = −(−1)^{|z|} f̄_i` where `∂z = Σ x_j f_j`: for `z = e_{i_1}⊗rest` the value is
/// `−(−1)^{w}·rest` when `i_1 = i` and zero otherwise. Returns `(sign, word index)`.
pub fn m2zero_action(e: usize, letters: &[usize], i: usize) -> Result<Option<(i64, usize)>> {
    if letters.iter().any(|&l| l >= e) || i >= e {
        return Err(Error::DegreeMismatch("not a basis word".into()));
    }
    let w = letters.len();
    match letters.first() {
        Some(&first) if first == i => Ok(Some((1 + w as i64, word_index(e, &letters[1..])))),
        _ => Ok(None),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct M2ZeroReport {
    pub embedding_dimension: usize,
    pub max_length: usize,
    pub resolution_matches: bool,
    /// Word/generator pairs on which the formula, read through `ρ`, equals the derivation action.
    pub agreeing: usize,
    /// Pairs on which the formula equals the derivation action on the same word.
    pub raw_agreeing: usize,
    pub checked: usize,
    /// `(n, dim Ext^n(k,R), e·b_n − b_{n−1})`
    pub presentation: Vec<(usize, usize, i64)>,
}

/// Cross-checks the word formula against the derivation action on `Tor` (through the comparison
/// map to the acyclic closure and the signed reversal `ρ`, which trades `∂` on the first factor for
/// `∂` on the last; without `ρ` the two differ), the word resolution against the minimal resolution, and `dim Ext^n(k,R) = e·b_n − b_{n−1}`.
pub fn m2zero_cross_check(ring: &Arc<RingPresentation>, max_length: usize) -> Result<M2ZeroReport> {
    let e = ring.embedding_dimension();
    let field = ring.field();
    let top = max_length + 1;
    let words = m2zero_word_resolution(ring, top)?;
    words.check_square_zero()?;
    let minimal = minimal_resolution(ring, &ModuleSpec::Residue, top);
    let mut resolution_matches = words.betti() == minimal.complex.betti() && words.is_minimal();
    for n in 1..top {
        if words.homology(n, n as i64).dim() != 0 {
            resolution_matches = false;
        }
    }
    let alg = Arc::new(acyclic_closure(ring, top)?);
    let tor = TorModule::residue(alg.clone(), top)?;
    // generator of F_0 ↦ unit; the constant parts give the change of basis on Tor
    let seed = vec![alg.complex().generator(0, 0)];
    let cmp = lift_to_chain_map(&words, alg.complex(), 0, 0, seed, top)?;
    let to_tate = |w: usize, j: usize| -> Vector {
        let mut v = vec![field.zero(); tor.dim(w, w as i64)];
        for (h, x) in alg.complex().constant_part(w, w as i64, cmp.image(w, j)) {
            // Tor basis at (w,w) is indexed by the generators of F_w in that degree
            let pos = (0..alg.complex().rank(w))
                .filter(|&g| alg.complex().gen_degree(w, g) == w)
                .position(|g| g == h)
                .expect("diagonal generator");
            v[pos] = x;
        }
        v
    };
    let gens: Vec<PiGenerator> = pi_generators(&alg, 1)?;
    let var_of = |g: &PiGenerator| -> usize {
        let name = g.name.trim_start_matches("θ[").trim_end_matches(']');
        alg.variable_index(name).unwrap_or(usize::MAX)
    };
    // ρ(u_1⊗⋯⊗u_w) = (−1)^{w(w−1)/2} u_w⊗⋯⊗u_1 swaps the factor ∂ acts on
    let reversal = |w: usize, letters: &[usize]| -> (Scalar, usize) {
        let rev: Vec<usize> = letters.iter().rev().copied().collect();
        (field.sign((w * w.saturating_sub(1) / 2) as i64), word_index(e, &rev))
    };
    let mut agreeing = 0;
    let mut raw_agreeing = 0;
    let mut checked = 0;
    for w in 1..=max_length {
        for j in 0..e.pow(w as u32) {
            let letters = word_letters(e, w, j);
            let z = tor.class(w, w as i64, to_tate(w, j));
            for g in &gens {
                let i = var_of(g);
                if i >= e {
                    return Err(Error::ConventionViolation(format!("{} is not dual to a degree-one variable", g.name)));
                }
                let via_derivation = tor.right_action_chain(&z, &g.chain)?.coords;
                let formula = |word: &[usize], sign: &Scalar| -> Result<Vector> {
                    let mut out = vec![field.zero(); via_derivation.len()];
                    if let Some((sg, k)) = m2zero_action(e, word, i)? {
                        let (s2, k2) = reversal(w - 1, &word_letters(e, w - 1, k));
                        let c = &(&field.sign(sg) * sign) * &s2;
                        for (a, x) in out.iter_mut().zip(&to_tate(w - 1, k2)) {
                            *a = x * &c;
                        }
                    }
                    Ok(out)
                };
                let (s1, k1) = reversal(w, &letters);
                if formula(&word_letters(e, w, k1), &s1)? == via_derivation {
                    agreeing += 1;
                }
                let mut raw = vec![field.zero(); via_derivation.len()];
                if let Some((sg, k)) = m2zero_action(e, &letters, i)? {
                    for (a, x) in raw.iter_mut().zip(&to_tate(w - 1, k)) {
                        *a = x * &field.sign(sg);
                    }
                }
                if raw == via_derivation {
                    raw_agreeing += 1;
                }
                checked += 1;
            }
        }
    }
    let ext = ext_k_r(&words);
    let tot = ext.total_by_degree();
    let b = words.betti();
    let presentation = (0..top)
        .map(|n| {
            let expected = (e * b[n]) as i64 - if n > 0 { b[n - 1] as i64 } else { 0 };
            (n, tot.get(&n).copied().unwrap_or(0), expected)
        })
        .collect();
    Ok(M2ZeroReport {
        embedding_dimension: e,
        max_length,
        resolution_matches,
        agreeing,
        raw_agreeing,
        checked,
        presentation,
    })
}

/// `π` generators of degree ≤ 2 as named ℰ classes, for regular-bimodule tables.
pub fn generator_classes(alg: &TateAlgebra, ext: &ExtAlgebra) -> Result<Vec<(String, Bidegree, Vector)>> {
    let mut out = Vec::new();
    for n in 1..=2 {
        if alg.top() < n {
            break;
        }
        let basis = homotopy_lie_basis(alg, n)?;
        let gens = pi_generators(alg, n)?;
        for (d, g) in basis.iter().zip(gens) {
            let c = d.ext_class(alg, ext);
            out.push((g.name, (c.degree as i64, c.internal), c.coords));
        }
    }
    Ok(out)
}
