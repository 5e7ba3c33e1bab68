//! `Tor^R(k,N) = H(F ⊗_R G)` with `F` the acyclic closure, and the two actions on it.
//!
//! Signs: `z·θ = −Σ(−1)^{|θ|(|f|+|g|)} θ(f)⊗g` on the `F` factor and
//! `α·z = Σ(−1)^{|α||f|} f⊗α(g)` on the `G` factor.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{tensor, FreeComplex, TensorComplex};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{axpy, is_zero_vector, Matrix, Solver, Vector};
use crate::resolution::{
    lift_to_chain_map, minimal_resolution, ChainMap, ClassKind, CohomologyClass, ModuleSpec,
};
use crate::tate::{homotopy_lie_basis, GammaDerivation, TateAlgebra};

/// Which generators index the basis of `Tor_n`: for `N = k` the classes are read through
/// `F ⊗ ε` (so `x_i⊗1 − 1⊗x_i ↦ x_i`), otherwise through `ε ⊗ G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Projection {
    FSide,
    GSide,
}

#[derive(Clone, Debug)]
pub struct TorModule {
    f: Arc<TateAlgebra>,
    g: Arc<FreeComplex>,
    residue: bool,
    projection: Projection,
    tensor: TensorComplex,
    top: usize,
    reps: BTreeMap<(usize, i64), Vec<Vector>>,
    gens: BTreeMap<(usize, i64), Vec<usize>>,
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl TorModule {
    /// `Tor^R(k, N)` through homological degree `top`; `f` must reach `top`.
    pub fn new(f: Arc<TateAlgebra>, module: &ModuleSpec, top: usize) -> Result<Self> {
        Self::build(f, module, top, false)
    }

    /// Same homology, but with the basis always read through `ε ⊗ G`, i.e. dual to the
    /// generators of `G`; used for `Tor^R(M,k)^∨ = Ext_R(M,k)`.
    pub fn new_g_projected(f: Arc<TateAlgebra>, module: &ModuleSpec, top: usize) -> Result<Self> {
        Self::build(f, module, top, true)
    }

    fn build(f: Arc<TateAlgebra>, module: &ModuleSpec, top: usize, g_side: bool) -> Result<Self> {
        if f.top() < top {
            return Err(Error::Truncation {
                requested: top,
                bound: f.top(),
            });
        }
        let (g, residue, mut truncated, mut notes) = if module.is_residue_field() {
            (Arc::new(f.complex().clone()), true, f.truncated, f.notes.clone())
        } else {
            let r = minimal_resolution(f.ring(), module, top);
            let tr = r.truncated || f.truncated;
            let mut notes = f.notes.clone();
            notes.extend(r.notes.iter().cloned());
            (Arc::new(r.complex), false, tr, notes)
        };
        let projection = if residue && !g_side { Projection::FSide } else { Projection::GSide };
        let tensor = tensor(f.complex(), &g, top);
        let bound = f.ring().bound() as i64;
        let mut tor = TorModule {
            f,
            g,
            residue,
            projection,
            tensor,
            top,
            reps: BTreeMap::new(),
            gens: BTreeMap::new(),
            truncated: false,
            notes: Vec::new(),
        };
        for n in 0..=top {
            let side = tor.side_complex();
            let mut by_t: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
            for (j, &a) in side.degrees(n).iter().enumerate() {
                by_t.entry(a as i64).or_default().push(j);
            }
            for (t, js) in by_t {
                if t > bound {
                    truncated = true;
                    notes.push(format!("Tor_{n} in internal degree {t} lies beyond the ring bound"));
                    continue;
                }
                let reps = tor.lift_basis(n, t, &js)?;
                tor.gens.insert((n, t), js);
                tor.reps.insert((n, t), reps);
            }
        }
        tor.truncated = truncated;
        tor.notes = notes;
        Ok(tor)
    }

    pub fn residue(f: Arc<TateAlgebra>, top: usize) -> Result<Self> {
        Self::new(f, &ModuleSpec::Residue, top)
    }

    pub fn field(&self) -> Field {
        self.f.field()
    }

    pub fn tate(&self) -> &Arc<TateAlgebra> {
        &self.f
    }

    pub fn g_complex(&self) -> &FreeComplex {
        &self.g
    }

    pub fn tensor(&self) -> &TensorComplex {
        &self.tensor
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn is_residue(&self) -> bool {
        self.residue
    }

    fn side_complex(&self) -> &FreeComplex {
        match self.projection {
            Projection::FSide => self.f.complex(),
            Projection::GSide => &self.g,
        }
    }

    /// Index in `(F⊗G)_n` of the pair read by the projection for side generator `j`.
    fn projection_pair(&self, n: usize, j: usize) -> usize {
        match self.projection {
            Projection::FSide => self.tensor.index(n, n, j, 0),
            Projection::GSide => self.tensor.index(n, 0, 0, j),
        }
        .expect("projection pair present")
    }

    fn lift_basis(&self, n: usize, t: i64, js: &[usize]) -> Result<Vec<Vector>> {
        let c = &self.tensor.complex;
        let field = self.field();
        let piece = c.piece(n, t);
        let d = c.diff_matrix(n, t);
        let mut rows: Vec<Vec<Scalar>> = (0..d.rows()).map(|r| d.row(r).to_vec()).collect();
        for &j in js {
            let mut row = vec![field.zero(); piece.dim];
            let st = piece.start(self.projection_pair(n, j)).expect("constant block");
            row[st] = field.one();
            rows.push(row);
        }
        let m = Matrix::from_rows(field, rows)?;
        let solver = Solver::new(&m);
        js.iter()
            .enumerate()
            .map(|(k, _)| {
                let mut rhs = vec![field.zero(); m.rows()];
                rhs[d.rows() + k] = field.one();
                solver.solve(&rhs).ok_or_else(|| {
                    Error::NoLift(format!("no cycle lifting Tor_{n} basis element {k} in degree {t}"))
                })
            })
            .collect()
    }

    pub fn dims(&self) -> BTreeMap<(usize, i64), usize> {
        self.gens.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    pub fn total_by_degree(&self) -> Vec<usize> {
        let mut out = vec![0; self.top + 1];
        for (&(n, _), v) in &self.gens {
            out[n] += v.len();
        }
        out
    }

    pub fn internal_degrees(&self, n: usize) -> Vec<i64> {
        self.gens.keys().filter(|k| k.0 == n).map(|k| k.1).collect()
    }

    pub fn dim(&self, n: usize, t: i64) -> usize {
        self.gens.get(&(n, t)).map_or(0, Vec::len)
    }

    /// Labels of the basis classes of `Tor_{n,t}`.
    pub fn basis_labels(&self, n: usize, t: i64) -> Vec<String> {
        self.gens
            .get(&(n, t))
            .map(|js| js.iter().map(|&j| self.side_complex().label(n, j).to_string()).collect())
            .unwrap_or_default()
    }

    pub fn class(&self, n: usize, t: i64, coords: Vector) -> CohomologyClass {
        assert_eq!(coords.len(), self.dim(n, t), "coordinate length");
        CohomologyClass {
            kind: ClassKind::Tor,
            degree: n,
            internal: t,
            coords,
        }
    }

    pub fn zero_class(&self, n: usize, t: i64) -> CohomologyClass {
        self.class(n, t, vec![self.field().zero(); self.dim(n, t)])
    }

    pub fn basis_class(&self, n: usize, t: i64, k: usize) -> CohomologyClass {
        let mut c = vec![self.field().zero(); self.dim(n, t)];
        c[k] = self.field().one();
        self.class(n, t, c)
    }

    pub fn basis_classes(&self, n: usize) -> Vec<CohomologyClass> {
        self.internal_degrees(n)
            .into_iter()
            .flat_map(|t| (0..self.dim(n, t)).map(move |k| (t, k)))
            .map(|(t, k)| self.basis_class(n, t, k))
            .collect()
    }

    /// The stored cycle representing a class.
    pub fn representative(&self, z: &CohomologyClass) -> Vector {
        let mut out = self.tensor.complex.zero(z.degree, z.internal);
        if let Some(reps) = self.reps.get(&(z.degree, z.internal)) {
            for (c, r) in z.coords.iter().zip(reps) {
                axpy(&mut out, c, r);
            }
        }
        out
    }

    /// Class of a cycle in `(F⊗G)_{n,t}`; a non-cycle is a convention violation.
    pub fn class_of_cycle(&self, n: usize, t: i64, v: &[Scalar]) -> Result<CohomologyClass> {
        if n >= 1 && !is_zero_vector(&self.tensor.complex.apply_diff(n, t, v)) {
            return Err(Error::ConventionViolation(format!(
                "action output in bidegree ({n}, {t}) is not a cycle"
            )));
        }
        let Some(js) = self.gens.get(&(n, t)) else {
            return Ok(self.class(n, t, Vec::new()));
        };
        let piece = self.tensor.complex.piece(n, t);
        let coords = js
            .iter()
            .map(|&j| v[piece.start(self.projection_pair(n, j)).expect("constant block")].clone())
            .collect();
        Ok(self.class(n, t, coords))
    }

    /// Applies a map on one tensor factor: images of generators from `cm`, with a sign
    /// depending on the `F`-degree of each pair.
    fn act(
        &self,
        on_f: bool,
        cm: &ChainMap,
        n: usize,
        t: i64,
        v: &[Scalar],
        sign: impl Fn(usize) -> Scalar,
    ) -> Result<Vector> {
        let p = cm.shift;
        let s = cm.internal;
        let ring = self.f.ring();
        let tc = &self.tensor.complex;
        if n < p {
            return Ok(Vec::new());
        }
        let target = tc.piece(n - p, t - s);
        let mut out = vec![self.field().zero(); target.dim];
        let src = tc.piece(n, t);
        for &(k, off, rd) in &src.blocks {
            let c = &v[off..off + ring.dim(rd)];
            if is_zero_vector(c) {
                continue;
            }
            let (i, fi, gj) = self.tensor.pairs[n][k];
            let (cx, deg, gen) = if on_f { (self.f.complex(), i, fi) } else { (&*self.g, n - i, gj) };
            if deg < p {
                continue;
            }
            let img = cm.maps.get(deg - p).and_then(|m| m.get(gen)).ok_or(Error::Truncation {
                requested: deg,
                bound: cm.shift + cm.maps.len().saturating_sub(1),
            })?;
            let a = cx.gen_degree(deg, gen) as i64;
            let ip = cx.piece(deg - p, a - s);
            let sg = sign(i);
            for &(h, off2, rd2) in &ip.blocks {
                let d = &img[off2..off2 + ring.dim(rd2)];
                if is_zero_vector(d) {
                    continue;
                }
                let Some(prod) = ring.mul_homogeneous(rd, c, rd2, d) else { continue };
                let idx = if on_f {
                    self.tensor.index(n - p, i - p, h, gj)
                } else {
                    self.tensor.index(n - p, i, fi, h)
                }
                .expect("pair in range");
                if let Some(st) = target.start(idx) {
                    axpy(&mut out[st..st + prod.len()], &sg, &prod);
                }
            }
        }
        Ok(out)
    }

    /// `z·θ` for a Γ-derivation given through its chain map on `F`.
    pub fn right_action_chain(&self, z: &CohomologyClass, cm: &ChainMap) -> Result<CohomologyClass> {
        let (p, s) = (cm.shift, cm.internal);
        if z.degree < p {
            return Ok(self.zero_class(0, z.internal - s));
        }
        let field = self.field();
        let sign = -field.sign((p * z.degree) as i64);
        let v = self.representative(z);
        let out = self.act(true, cm, z.degree, z.internal, &v, |_| sign.clone())?;
        self.class_of_cycle(z.degree - p, z.internal - s, &out)
    }

    /// The right action on an arbitrary chain of `(F⊗G)_{n,t}`, before any homology reduction.
    pub fn right_action_on_chain(&self, n: usize, t: i64, v: &[Scalar], cm: &ChainMap) -> Result<Vector> {
        let sign = -self.field().sign((cm.shift * n) as i64);
        self.act(true, cm, n, t, v, |_| sign.clone())
    }

    pub fn right_action(&self, z: &CohomologyClass, theta: &GammaDerivation) -> Result<CohomologyClass> {
        self.right_action_chain(z, &theta.as_chain_map(&self.f))
    }

    /// `α·z` for a chain self-map `α` of `G`.
    pub fn left_action_chain(&self, cm: &ChainMap, z: &CohomologyClass) -> Result<CohomologyClass> {
        let (p, s) = (cm.shift, cm.internal);
        if z.degree < p {
            return Ok(self.zero_class(0, z.internal - s));
        }
        let field = self.field();
        let v = self.representative(z);
        let out = self.act(false, cm, z.degree, z.internal, &v, |i| field.sign((p * i) as i64))?;
        self.class_of_cycle(z.degree - p, z.internal - s, &out)
    }

    /// `θ·z` for `N = k`, with `θ` acting on the second factor.
    pub fn left_action(&self, theta: &GammaDerivation, z: &CohomologyClass) -> Result<CohomologyClass> {
        self.require_residue()?;
        self.left_action_chain(&theta.as_chain_map(&self.f), z)
    }

    /// `a·z` for `a ∈ ℰ` (basis dual to DP monomials), through a chain lift on `G = F`.
    pub fn left_action_ext(&self, a: &CohomologyClass, z: &CohomologyClass) -> Result<CohomologyClass> {
        self.require_residue()?;
        let ext = self.f.ext_algebra();
        let cm = ext.lift(a, z.degree.saturating_sub(a.degree))?;
        self.left_action_chain(&cm, z)
    }

    /// Lift of a cocycle `G_n → N` (images of the generators of `G_n` in `G_0`) to a chain
    /// self-map of `G`, i.e. a representative of a class in `Ext_R(N,N)`.
    pub fn lift_endomorphism(&self, n: usize, internal: i64, seed: Vec<Vector>) -> Result<ChainMap> {
        lift_to_chain_map(&self.g, &self.g, n, internal, seed, self.top.saturating_sub(n))
    }

    pub fn identity(&self) -> Result<ChainMap> {
        let seed = vec![self.g.generator(0, 0)];
        self.lift_endomorphism(0, 0, seed)
    }

    fn require_residue(&self) -> Result<()> {
        if self.residue {
            Ok(())
        } else {
            Err(Error::Precondition("derivation left action needs N = k".into()))
        }
    }

    /// `z·(θ_1⋯θ_r) = (⋯(z·θ_1)⋯)·θ_r`
    pub fn right_action_word(&self, z: &CohomologyClass, word: &[&ChainMap]) -> Result<CohomologyClass> {
        let mut cur = z.clone();
        for cm in word {
            cur = self.right_action_chain(&cur, cm)?;
        }
        Ok(cur)
    }

    /// `(θ_1⋯θ_r)·z = θ_1·(⋯(θ_r·z))`
    pub fn left_action_word(&self, word: &[&ChainMap], z: &CohomologyClass) -> Result<CohomologyClass> {
        let mut cur = z.clone();
        for cm in word.iter().rev() {
            cur = self.left_action_chain(cm, &cur)?;
        }
        Ok(cur)
    }

    /// Matrix of `− · θ` from `Tor_{n,t}` to `Tor_{n−p,t−s}` (columns = basis images).
    pub fn right_matrix(&self, cm: &ChainMap, n: usize, t: i64) -> Result<Matrix> {
        let cols = (0..self.dim(n, t))
            .map(|k| Ok(self.right_action_chain(&self.basis_class(n, t, k), cm)?.coords))
            .collect::<Result<Vec<_>>>()?;
        let rows = if n >= cm.shift { self.dim(n - cm.shift, t - cm.internal) } else { 0 };
        Ok(Matrix::from_columns(self.field(), rows, &cols))
    }

    pub fn left_matrix(&self, cm: &ChainMap, n: usize, t: i64) -> Result<Matrix> {
        let cols = (0..self.dim(n, t))
            .map(|k| Ok(self.left_action_chain(cm, &self.basis_class(n, t, k))?.coords))
            .collect::<Result<Vec<_>>>()?;
        let rows = if n >= cm.shift { self.dim(n - cm.shift, t - cm.internal) } else { 0 };
        Ok(Matrix::from_columns(self.field(), rows, &cols))
    }

    pub fn class_string(&self, z: &CohomologyClass) -> String {
        let labels = self.basis_labels(z.degree, z.internal);
        let terms: Vec<String> = z
            .coords
            .iter()
            .zip(&labels)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, l)| if c.is_one() { format!("[{l}]") } else { format!("{c}*[{l}]") })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// A named π generator with its chain map on `F`.
#[derive(Clone, Debug)]
pub struct PiGenerator {
    pub name: String,
    pub derivation: GammaDerivation,
    pub chain: ChainMap,
}

/// Names `ξ_t`/`χ_t` for closed-form complete-intersection generators, `θ[w]` otherwise.
pub fn pi_generators(alg: &TateAlgebra, n: usize) -> Result<Vec<PiGenerator>> {
    let basis = homotopy_lie_basis(alg, n)?;
    let names: Vec<String> = if alg.is_explicit_ci() {
        let sym = if n == 1 { "ξ" } else { "χ" };
        (1..=basis.len()).map(|t| format!("{sym}{t}")).collect()
    } else {
        alg.variables()
            .iter()
            .filter(|v| v.hdeg == n)
            .map(|v| format!("θ[{}]", v.name))
            .collect()
    };
    Ok(basis
        .into_iter()
        .zip(names)
        .map(|(d, name)| PiGenerator {
            chain: d.as_chain_map(alg),
            name,
            derivation: d,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryWitness {
    pub actor: String,
    pub actor_degree: usize,
    pub class: String,
    pub class_degree: usize,
    /// `a·m`
    pub left: String,
    /// `(−1)^{|a||m|} m·a`
    pub right_signed: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub symmetric: bool,
    pub checked_pairs: usize,
    pub max_degree: usize,
    pub witnesses: Vec<SymmetryWitness>,
    pub notes: Vec<String>,
}

/// Checks `a·m = (−1)^{|a||m|} m·a` for π generators `a` of degree ≤ 2 (and their products of
/// length two) against every basis class `m` of `Tor^R(k,k)` through `max_degree`.
pub fn symmetry_report(alg: &Arc<TateAlgebra>, max_degree: usize) -> Result<SymmetryReport> {
    let tor = TorModule::residue(alg.clone(), max_degree)?;
    let mut gens = Vec::new();
    for n in 1..=2.min(max_degree) {
        gens.extend(pi_generators(alg, n)?);
    }
    let mut notes = Vec::new();
    if !alg.is_explicit_ci() {
        notes.push("π generators of degree ≤ 2 only; higher π is not tested".into());
    }
    notes.extend(tor.notes.iter().cloned());
    let mut words: Vec<(String, Vec<&PiGenerator>)> = gens.iter().map(|g| (g.name.clone(), vec![g])).collect();
    for a in &gens {
        for b in &gens {
            if a.derivation.degree + b.derivation.degree <= max_degree {
                words.push((format!("{}{}", a.name, b.name), vec![a, b]));
            }
        }
    }
    let field = tor.field();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for (name, word) in &words {
        let chains: Vec<&ChainMap> = word.iter().map(|g| &g.chain).collect();
        let p: usize = word.iter().map(|g| g.derivation.degree).sum();
        for n in p..=max_degree {
            for m in tor.basis_classes(n) {
                let left = tor.left_action_word(&chains, &m)?;
                let right = tor.right_action_word(&m, &chains)?;
                let sign = field.sign((p * n) as i64);
                let right_signed = tor.class(
                    right.degree,
                    right.internal,
                    right.coords.iter().map(|c| c * &sign).collect(),
                );
                checked += 1;
                if left != right_signed {
                    witnesses.push(SymmetryWitness {
                        actor: name.clone(),
                        actor_degree: p,
                        class: tor.class_string(&m),
                        class_degree: n,
                        left: tor.class_string(&left),
                        right_signed: tor.class_string(&right_signed),
                    });
                }
            }
        }
    }
    Ok(SymmetryReport {
        symmetric: witnesses.is_empty(),
        checked_pairs: checked,
        max_degree,
        witnesses,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_presentation;
    use crate::tate::acyclic_closure;

    fn setup(s: &str, d: usize, top: usize) -> (Arc<TateAlgebra>, TorModule) {
        let r = Arc::new(parse_presentation(s, d).unwrap());
        let a = Arc::new(acyclic_closure(&r, top).unwrap());
        let t = TorModule::residue(a.clone(), top).unwrap();
        (a, t)
    }

    #[test]
    fn dims_match_betti() {
        let (_, t) = setup("F101[x,y]/(x*y)", 10, 4);
        assert_eq!(t.total_by_degree(), vec![1, 2, 2, 2, 2]);
        let (_, t) = setup("F101[x,y]/(x^3,y^3)", 12, 4);
        assert_eq!(t.total_by_degree(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn degree_one_representative() {
        // the basis class of T1 is x⊗1 − 1⊗x
        let (_, t) = setup("F101[x,y]/(x*y)", 10, 2);
        let z = t.basis_class(1, 1, 0);
        let v = t.representative(&z);
        let tc = t.tensor();
        let piece = tc.complex.piece(1, 1);
        let at = |i, f, g| piece.start(tc.index(1, i, f, g).unwrap()).unwrap();
        assert!(v[at(1, 0, 0)].is_one());
        assert_eq!(v[at(0, 0, 0)], -t.field().one());
        let c = at(0, 0, 1);
        assert!(v[c].is_zero());
    }

    #[test]
    fn example_nonsymmetry() {
        let (a, t) = setup("F101[x,y]/(x*y)", 10, 3);
        let xi = &pi_generators(&a, 1).unwrap()[1];
        assert_eq!(t.basis_labels(2, 2), vec!["T1*T2", "S1"]);
        let z = t.basis_class(2, 2, 1);
        let left = t.left_action_chain(&xi.chain, &z).unwrap();
        assert!(left.coords.iter().all(Scalar::is_zero));
        let right = t.right_action_chain(&z, &xi.chain).unwrap();
        assert_eq!(t.class_string(&right), "[T1]");
        let rep = symmetry_report(&a, 3).unwrap();
        assert!(!rep.symmetric);
    }

    #[test]
    fn ci_table() {
        let (a, t) = setup("F101[x,y]/(x^3,y^3)", 12, 4);
        let p1 = pi_generators(&a, 1).unwrap();
        let p2 = pi_generators(&a, 2).unwrap();
        let one = t.field().one();
        for (i, zi) in t.basis_classes(1).iter().enumerate() {
            for (j, xj) in p1.iter().enumerate() {
                let d = if i == j { one.clone() } else { t.field().zero() };
                assert_eq!(t.left_action_chain(&xj.chain, zi).unwrap().coords, vec![-d.clone()]);
                assert_eq!(t.right_action_chain(zi, &xj.chain).unwrap().coords, vec![d]);
            }
        }
        let deg2: Vec<_> = t
            .basis_classes(2)
            .into_iter()
            .filter(|z| t.basis_labels(2, z.internal)[z.coords.iter().position(Scalar::is_one).unwrap()].starts_with('S'))
            .collect();
        assert_eq!(deg2.len(), 2);
        for zi in &deg2 {
            let i = if t.class_string(zi).contains("S1") { 0 } else { 1 };
            for (tt, ch) in p2.iter().enumerate() {
                let d = if i == tt { -one.clone() } else { t.field().zero() };
                let l = t.left_action_chain(&ch.chain, zi).unwrap();
                let r = t.right_action_chain(zi, &ch.chain).unwrap();
                assert_eq!(l.coords, if l.coords.is_empty() { vec![] } else { vec![d.clone()] });
                assert_eq!(r.coords, if r.coords.is_empty() { vec![] } else { vec![d] });
            }
        }
        assert!(symmetry_report(&a, 4).unwrap().symmetric);
    }
}
