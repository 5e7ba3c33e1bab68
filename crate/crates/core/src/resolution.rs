//! Minimal graded free resolutions, chain-map lifting, Ext groups and the Yoneda product.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::complex::{FreeComplex, HomologyPiece};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{axpy, is_zero_vector, Matrix, Solver, Subspace, Vector};
use crate::parse::parse_ideal_text;
use crate::ring::RingPresentation;

/// A cyclic module `R/J`; `J = 𝔪` is the residue field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleSpec {
    Residue,
    /// Homogeneous generators of `J` as `(degree, normal form)`.
    Cyclic(Vec<(usize, Vector)>),
}

impl ModuleSpec {
    /// `k`, `R`, or a generator list `(p1,...,pk)` for `R/(p1,...,pk)`.
    pub fn parse(text: &str, ring: &RingPresentation) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed == "k" {
            return Ok(ModuleSpec::Residue);
        }
        if trimmed == "R" {
            return Ok(ModuleSpec::Cyclic(Vec::new()));
        }
        let field = ring.field();
        let mut gens = Vec::new();
        for (index, p) in parse_ideal_text(trimmed, ring.variables())?.iter().enumerate() {
            let mut degree = None;
            let mut acc: Option<Vector> = None;
            for (m, c) in p {
                let c = field.from_bigint(c);
                if c.is_zero() {
                    continue;
                }
                let d = m.iter().sum::<u32>() as usize;
                if *degree.get_or_insert(d) != d {
                    return Err(Error::Inhomogeneous { index });
                }
                let nf = ring.monomial_normal_form(m).ok_or(Error::Truncation {
                    requested: d,
                    bound: ring.bound(),
                })?;
                let v = acc.get_or_insert_with(|| vec![field.zero(); nf.len()]);
                axpy(v, &c, nf);
            }
            match (degree, acc) {
                (Some(0), Some(_)) => {
                    return Err(Error::Precondition(
                        "module generator is a unit; R/J would be zero".into(),
                    ))
                }
                (Some(d), Some(v)) if !is_zero_vector(&v) => gens.push((d, v)),
                _ => {}
            }
        }
        Ok(ModuleSpec::Cyclic(gens))
    }

    pub fn is_residue_field(&self) -> bool {
        matches!(self, ModuleSpec::Residue)
    }
}

/// A resolution together with its truncation diagnostics.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub complex: FreeComplex,
    /// Set when new generators were found at the internal-degree bound.
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl Resolution {
    pub fn betti(&self) -> Vec<usize> {
        self.complex.betti()
    }

    /// Betti numbers split by internal degree: `(n, degree) -> count`.
    pub fn graded_betti(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::new();
        for n in 0..=self.complex.top() {
            for &a in self.complex.degrees(n) {
                *out.entry((n, a)).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Minimal free resolution of `R/J` (or `k`) through homological degree `n_max`,
/// computed degreewise up to the ring's bound.
pub fn minimal_resolution(ring: &Arc<RingPresentation>, module: &ModuleSpec, n_max: usize) -> Resolution {
    let field = ring.field();
    let bound = ring.bound();
    let mut degrees = vec![vec![0usize]];
    let mut diff: Vec<Vec<Vector>> = vec![Vec::new()];
    let mut truncated = false;
    let mut notes = Vec::new();
    for n in 1..=n_max {
        let current = FreeComplex::new(ring.clone(), degrees.clone(), diff.clone());
        let mut new_degrees = Vec::new();
        let mut new_diff: Vec<Vector> = Vec::new();
        for t in 0..=bound {
            let ti = t as i64;
            let kernel: Vec<Vector> = if n == 1 {
                augmentation_kernel(ring, module, t)
            } else {
                current.diff_matrix(n - 1, ti).kernel_basis().expect("uniform")
            };
            if kernel.is_empty() {
                continue;
            }
            let dim = current.piece(n - 1, ti).dim;
            let mut span = Subspace::new(field, dim);
            for (g, &a) in new_degrees.iter().enumerate() {
                if a >= t {
                    continue;
                }
                let d = t - a;
                let img: &Vector = &new_diff[g];
                for b in 0..ring.dim(d) {
                    let mut e = vec![field.zero(); ring.dim(d)];
                    e[b] = field.one();
                    let mut out = vec![field.zero(); dim];
                    current.mul_ring_into(n - 1, a as i64, img, d, &e, &mut out);
                    span.insert(&out);
                }
            }
            for v in kernel {
                if span.insert(&v) {
                    new_degrees.push(t);
                    new_diff.push(v);
                    if t == bound {
                        truncated = true;
                    }
                }
            }
        }
        degrees.push(new_degrees);
        diff.push(new_diff);
    }
    if truncated {
        notes.push(format!(
            "generators appear at the internal-degree bound {bound}; higher syzygies may be missing"
        ));
    }
    let complex = FreeComplex::new(ring.clone(), degrees, diff);
    Resolution {
        complex,
        truncated,
        notes,
    }
}

fn augmentation_kernel(ring: &RingPresentation, module: &ModuleSpec, t: usize) -> Vec<Vector> {
    let field = ring.field();
    let dim = ring.dim(t);
    match module {
        ModuleSpec::Residue => {
            if t == 0 {
                return Vec::new();
            }
            (0..dim)
                .map(|b| {
                    let mut e = vec![field.zero(); dim];
                    e[b] = field.one();
                    e
                })
                .collect()
        }
        ModuleSpec::Cyclic(gens) => {
            let mut span = Subspace::new(field, dim);
            for (d, v) in gens.iter().filter(|(d, _)| *d <= t) {
                for b in 0..ring.dim(t - d) {
                    let mut e = vec![field.zero(); ring.dim(t - d)];
                    e[b] = field.one();
                    if let Some(p) = ring.mul_homogeneous(*d, v, t - d, &e) {
                        span.insert(&p);
                    }
                }
            }
            span.basis().to_vec()
        }
    }
}

/// A chain map `β : F_{n+i} → G_i` of internal degree `−s`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub shift: usize,
    pub internal: i64,
    /// `maps[i][j] = β_i(g_j)` for generator `g_j` of `F_{n+i}`, on the piece `(i, a_j − s)` of `G`.
    pub maps: Vec<Vec<Vector>>,
}

impl ChainMap {
    pub fn image(&self, i: usize, j: usize) -> &Vector {
        &self.maps[i][j]
    }

    /// `β_i` applied to an element of `(F_{n+i})_t`.
    pub fn apply(&self, source: &FreeComplex, target: &FreeComplex, i: usize, t: i64, v: &[Scalar]) -> Vector {
        source.apply_map(self.shift + i, t, v, target, i, -self.internal, |j| {
            self.maps.get(i).map(|m| &m[j])
        })
    }
}

/// Lifts a seed `β_0` (images of the generators of `F_n` in `G_0`) to a chain map through
/// `G_{depth}`, enforcing `∂β_i = (−1)^n β_{i−1}∂` degreewise.
pub fn lift_to_chain_map(
    source: &FreeComplex,
    target: &FreeComplex,
    n: usize,
    internal: i64,
    seed: Vec<Vector>,
    depth: usize,
) -> Result<ChainMap> {
    let field = source.field();
    let sign = field.sign(n as i64);
    let mut cm = ChainMap {
        shift: n,
        internal,
        maps: vec![seed],
    };
    let mut solvers: HashMap<(usize, i64), Solver> = HashMap::new();
    for i in 1..=depth.min(target.top()) {
        if n + i > source.top() {
            break;
        }
        let mut level = Vec::with_capacity(source.rank(n + i));
        for j in 0..source.rank(n + i) {
            let a = source.gen_degree(n + i, j) as i64;
            let t = a - internal;
            let d = source.boundary_of_generator(n + i, j);
            let rhs: Vector = cm
                .apply(source, target, i - 1, a, d)
                .iter()
                .map(|x| x * &sign)
                .collect();
            let solver = solvers
                .entry((i, t))
                .or_insert_with(|| Solver::new(&target.diff_matrix(i, t)));
            let x = solver.solve(&rhs).ok_or_else(|| {
                Error::NoLift(format!(
                    "no lift for generator {j} of degree {} at target degree {i}",
                    n + i
                ))
            })?;
            level.push(x);
        }
        cm.maps.push(level);
    }
    Ok(cm)
}

/// Which Ext is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    ExtKK,
    ExtKR,
    ExtMK,
    Tor,
}

/// A homogeneous class with coordinates over the stored basis of its bidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub kind: ClassKind,
    pub degree: usize,
    pub internal: i64,
    pub coords: Vector,
}

/// `Ext_R(k,k)` on top of a minimal resolution of `k`; the basis of `ℰ^{n,s}` is dual to the
/// generators of `F_n` of internal degree `s`, in generator order.
#[derive(Clone, Debug)]
pub struct ExtAlgebra {
    pub resolution: Resolution,
}

impl ExtAlgebra {
    pub fn new(ring: &Arc<RingPresentation>, n_max: usize) -> Self {
        ExtAlgebra {
            resolution: minimal_resolution(ring, &ModuleSpec::Residue, n_max),
        }
    }

    /// Uses any minimal resolution of `k`, e.g. the acyclic closure.
    pub fn from_resolution(resolution: Resolution) -> Self {
        ExtAlgebra { resolution }
    }

    pub fn complex(&self) -> &FreeComplex {
        &self.resolution.complex
    }

    pub fn field(&self) -> Field {
        self.complex().field()
    }

    pub fn top(&self) -> usize {
        self.complex().top()
    }

    /// Generators of `F_n` of internal degree `s`.
    pub fn basis(&self, n: usize, s: i64) -> Vec<usize> {
        (0..self.complex().rank(n))
            .filter(|&j| self.complex().gen_degree(n, j) as i64 == s)
            .collect()
    }

    /// Internal degrees occurring in cohomological degree `n`.
    pub fn internal_degrees(&self, n: usize) -> Vec<i64> {
        let mut v: Vec<i64> = self.complex().degrees(n).iter().map(|&a| a as i64).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn dims(&self) -> BTreeMap<(usize, i64), usize> {
        let mut out = BTreeMap::new();
        for n in 0..=self.top() {
            for s in self.internal_degrees(n) {
                out.insert((n, s), self.basis(n, s).len());
            }
        }
        out
    }

    pub fn class(&self, n: usize, s: i64, coords: Vector) -> CohomologyClass {
        assert_eq!(coords.len(), self.basis(n, s).len(), "coordinate length");
        CohomologyClass {
            kind: ClassKind::ExtKK,
            degree: n,
            internal: s,
            coords,
        }
    }

    pub fn basis_class(&self, n: usize, s: i64, k: usize) -> CohomologyClass {
        let len = self.basis(n, s).len();
        let mut c = vec![self.field().zero(); len];
        c[k] = self.field().one();
        self.class(n, s, c)
    }

    pub fn unit(&self) -> CohomologyClass {
        self.basis_class(0, 0, 0)
    }

    /// Full functional on generators of `F_n` represented by a class.
    pub fn functional(&self, a: &CohomologyClass) -> Vec<Scalar> {
        let f = self.field();
        let mut out = vec![f.zero(); self.complex().rank(a.degree)];
        for (k, j) in self.basis(a.degree, a.internal).into_iter().enumerate() {
            out[j] = a.coords[k].clone();
        }
        out
    }

    /// Chain-map lift of a class through `F_{depth}`.
    pub fn lift(&self, a: &CohomologyClass, depth: usize) -> Result<ChainMap> {
        let c = self.complex();
        let seed: Vec<Vector> = self
            .functional(a)
            .into_iter()
            .enumerate()
            .map(|(j, x)| {
                let t = c.gen_degree(a.degree, j) as i64 - a.internal;
                let mut v = c.zero(0, t);
                if t == 0 {
                    v[0] = x;
                } else {
                    debug_assert!(x.is_zero());
                }
                v
            })
            .collect();
        lift_to_chain_map(c, c, a.degree, a.internal, seed, depth)
    }

    /// Yoneda product `a · b = a ∘ lift(b)`.
    pub fn product(&self, a: &CohomologyClass, b: &CohomologyClass) -> Result<CohomologyClass> {
        let n = a.degree + b.degree;
        if n > self.top() {
            return Err(Error::Truncation {
                requested: n,
                bound: self.top(),
            });
        }
        let s = a.internal + b.internal;
        let lb = self.lift(b, a.degree)?;
        Ok(self.compose_with_lift(a, &lb, n, s))
    }

    /// The class of `a ∘ β_{|a|}` for a chain map `β` of shift `n − |a|`.
    pub fn compose_with_lift(&self, a: &CohomologyClass, lb: &ChainMap, n: usize, s: i64) -> CohomologyClass {
        let f = self.field();
        let c = self.complex();
        let fa = self.functional(a);
        let basis = self.basis(n, s);
        let coords = basis
            .iter()
            .map(|&j| {
                let img = lb.image(a.degree, j);
                let t = c.gen_degree(n, j) as i64 - lb.internal;
                let mut acc = f.zero();
                for (h, x) in c.constant_part(a.degree, t, img) {
                    acc += &(&fa[h] * &x);
                }
                acc
            })
            .collect();
        self.class(n, s, coords)
    }
}

/// Dimension table of `Ext^n(k, R)` per internal degree `s` (maps send `(F_n)_t` to `R_{t−s}`).
#[derive(Clone, Debug, Serialize)]
pub struct ExtKR {
    pub dims: BTreeMap<(usize, i64), usize>,
    /// Internal degrees left out because the ring bound does not cover them.
    pub incomplete: Vec<(usize, i64)>,
    #[serde(skip)]
    pub pieces: BTreeMap<(usize, i64), HomologyPiece>,
}

fn hom_to_ring_layout(f: &FreeComplex, n: usize, s: i64) -> Vec<(usize, usize, usize)> {
    let ring = f.ring();
    let mut out = Vec::new();
    let mut off = 0;
    for (j, &a) in f.degrees(n).iter().enumerate() {
        let d = a as i64 - s;
        if d >= 0 && (d as usize) <= ring.bound() {
            let dim = ring.dim(d as usize);
            if dim > 0 {
                out.push((j, off, d as usize));
                off += dim;
            }
        }
    }
    out
}

/// Matrix of `δφ = −(−1)^n φ∘∂` from `Hom(F_n, R)_s` to `Hom(F_{n+1}, R)_s`.
pub fn hom_to_ring_differential(f: &FreeComplex, n: usize, s: i64) -> Matrix {
    let ring = f.ring();
    let field = ring.field();
    let src = hom_to_ring_layout(f, n, s);
    let dst = hom_to_ring_layout(f, n + 1, s);
    let sdim: usize = src.iter().map(|b| ring.dim(b.2)).sum();
    let ddim: usize = dst.iter().map(|b| ring.dim(b.2)).sum();
    let mut m = Matrix::zeros(field, ddim, sdim);
    if n + 1 > f.top() {
        return m;
    }
    let sign = -field.sign(n as i64);
    let src_start: HashMap<usize, (usize, usize)> = src.iter().map(|&(j, o, d)| (j, (o, d))).collect();
    for &(h, ho, hd) in &dst {
        let ah = f.gen_degree(n + 1, h) as i64;
        let dh = f.boundary_of_generator(n + 1, h);
        let p = f.piece(n, ah);
        for &(g, off, rd) in &p.blocks {
            let Some(&(go, gd)) = src_start.get(&g) else { continue };
            let r = &dh[off..off + ring.dim(rd)];
            if is_zero_vector(r) {
                continue;
            }
            for b in 0..ring.dim(gd) {
                let mut e = vec![field.zero(); ring.dim(gd)];
                e[b] = field.one();
                let prod = ring.mul_homogeneous(rd, r, gd, &e).expect("hd within bound");
                debug_assert_eq!(rd + gd, hd);
                for (q, x) in prod.iter().enumerate() {
                    if !x.is_zero() {
                        m.set(ho + q, go + b, &sign * x);
                    }
                }
            }
        }
    }
    m
}

/// Cohomology of `Hom_R(F, R)` for the resolution `F` of `k`.
pub fn ext_k_r(f: &FreeComplex) -> ExtKR {
    let ring = f.ring();
    let field = ring.field();
    let bound = ring.bound() as i64;
    let mut dims = BTreeMap::new();
    let mut incomplete = Vec::new();
    let mut pieces = BTreeMap::new();
    for n in 0..f.top() {
        let all: Vec<usize> = (n.saturating_sub(1)..=n + 1).flat_map(|m| f.degrees(m).to_vec()).collect();
        let (Some(&lo), Some(&hi)) = (all.iter().min(), all.iter().max()) else { continue };
        for s in (lo as i64 - bound)..=(hi as i64) {
            let fits = (n.saturating_sub(1)..=n + 1)
                .all(|m| f.degrees(m).iter().all(|&a| a as i64 - s <= bound));
            let dim_here: usize = hom_to_ring_layout(f, n, s).iter().map(|b| ring.dim(b.2)).sum();
            if dim_here == 0 {
                continue;
            }
            if !fits {
                incomplete.push((n, s));
                continue;
            }
            let z = hom_to_ring_differential(f, n, s).kernel_basis().expect("uniform");
            let mut bspace = Subspace::new(field, dim_here);
            if n > 0 {
                let prev = hom_to_ring_differential(f, n - 1, s);
                for c in 0..prev.cols() {
                    bspace.insert(&prev.column(c));
                }
            }
            let bdim = bspace.dim();
            let mut span = bspace.clone();
            let reps: Vec<Vector> = z.into_iter().filter(|v| span.insert(v)).collect();
            if !reps.is_empty() {
                dims.insert((n, s), reps.len());
            }
            pieces.insert(
                (n, s),
                HomologyPiece::new(field, dim_here, reps, bspace.basis().to_vec(), bdim),
            );
        }
    }
    ExtKR {
        dims,
        incomplete,
        pieces,
    }
}

impl ExtKR {
    pub fn total_by_degree(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for (&(n, _), &d) in &self.dims {
            *out.entry(n).or_insert(0) += d;
        }
        out
    }

    /// Layout of cochains in `Hom(F_n, R)_s`: `(generator, offset, ring degree)`.
    pub fn layout(f: &FreeComplex, n: usize, s: i64) -> Vec<(usize, usize, usize)> {
        hom_to_ring_layout(f, n, s)
    }
}

/// `Ext_R(M, k)` dims: graded Betti numbers of the minimal resolution of `M`.
pub fn ext_m_k(ring: &Arc<RingPresentation>, module: &ModuleSpec, n_max: usize) -> Resolution {
    minimal_resolution(ring, module, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_presentation;

    fn ring(s: &str, d: usize) -> Arc<RingPresentation> {
        Arc::new(parse_presentation(s, d).unwrap())
    }

    #[test]
    fn betti_examples() {
        let m2 = ring("F101[x,y]/(x^2,x*y,y^2)", 8);
        let r = minimal_resolution(&m2, &ModuleSpec::Residue, 5);
        assert_eq!(r.betti(), vec![1, 2, 4, 8, 16, 32]);
        let ci = ring("F101[x,y]/(x^3,y^3)", 12);
        assert_eq!(
            minimal_resolution(&ci, &ModuleSpec::Residue, 5).betti(),
            vec![1, 2, 3, 4, 5, 6]
        );
        let h = ring("F101[x,y]/(x*y)", 12);
        let r = minimal_resolution(&h, &ModuleSpec::Residue, 4);
        assert_eq!(r.betti(), vec![1, 2, 2, 2, 2]);
        assert!(r.complex.check_square_zero().is_ok());
        assert!(r.complex.is_minimal());
        assert!(!r.truncated);
    }

    #[test]
    fn cyclic_modules() {
        let h = ring("F101[x,y]/(x*y)", 10);
        let m = ModuleSpec::parse("(x)", &h).unwrap();
        // R/(x) over k[x,y]/(xy): periodic resolution ... <-y- <-x- R
        assert_eq!(minimal_resolution(&h, &m, 4).betti(), vec![1, 1, 1, 1, 1]);
        let free = ModuleSpec::parse("R", &h).unwrap();
        assert_eq!(minimal_resolution(&h, &free, 3).betti(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn identity_lift() {
        let ci = ring("F101[x,y]/(x^3,y^3)", 10);
        let e = ExtAlgebra::new(&ci, 4);
        let lift = e.lift(&e.unit(), 4).unwrap();
        let c = e.complex();
        for i in 0..=4 {
            for j in 0..c.rank(i) {
                let t = c.gen_degree(i, j) as i64;
                let consts = c.constant_part(i, t, lift.image(i, j));
                for (h, x) in consts {
                    assert_eq!(x.is_one(), h == j);
                    assert!(x.is_zero() || x.is_one());
                }
            }
        }
    }

    #[test]
    fn yoneda_examples() {
        let m2 = ring("F101[x,y]/(x^2,x*y,y^2)", 6);
        let e = ExtAlgebra::new(&m2, 3);
        let y1 = e.basis_class(1, 1, 0);
        let y2 = e.basis_class(1, 1, 1);
        let mut span = Subspace::new(e.field(), 4);
        for a in [&y1, &y2] {
            for b in [&y1, &y2] {
                span.insert(&e.product(a, b).unwrap().coords);
            }
        }
        assert_eq!(span.dim(), 4);
        assert_eq!(e.product(&e.unit(), &y1).unwrap(), y1);
        assert_eq!(e.product(&y2, &e.unit()).unwrap(), y2);

        let ci = ring("F101[x,y]/(x^3,y^3)", 10);
        let e = ExtAlgebra::new(&ci, 3);
        for k in 0..2 {
            let xi = e.basis_class(1, 1, k);
            assert!(is_zero_vector(&e.product(&xi, &xi).unwrap().coords));
        }
    }

    #[test]
    fn ext_k_r_gorenstein() {
        let ci = ring("F101[x,y]/(x^3,y^3)", 12);
        let e = ExtAlgebra::new(&ci, 4);
        let ekr = ext_k_r(e.complex());
        assert_eq!(ekr.dims, BTreeMap::from([((0, -4), 1)]));
        let h = ring("F101[x,y]/(x*y)", 12);
        let e = ExtAlgebra::new(&h, 4);
        let ekr = ext_k_r(e.complex());
        let total: usize = ekr.dims.values().sum();
        assert_eq!(total, 1);
        assert_eq!(ekr.total_by_degree().get(&1), Some(&1));
    }
}
