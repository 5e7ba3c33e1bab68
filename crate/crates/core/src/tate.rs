//! Acyclic closures `R⟨X⟩` of the residue field with divided powers, and Γ-derivations.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{axpy, is_zero_vector, Solver, Vector};
use crate::resolution::{ChainMap, CohomologyClass, ExtAlgebra, Resolution};
use crate::ring::RingPresentation;

/// Exponent vector over the Tate variables; odd variables carry 0 or 1, even ones a
/// divided-power exponent.
pub type DPMonomial = Vec<u32>;

/// A homogeneous element `Σ r_m m` with `r_m ∈ R_{ideg − ideg(m)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateElement {
    pub hdeg: usize,
    pub ideg: i64,
    pub terms: BTreeMap<DPMonomial, Vector>,
}

impl TateElement {
    pub fn zero(hdeg: usize, ideg: i64) -> Self {
        TateElement {
            hdeg,
            ideg,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: DPMonomial, c: &Scalar, v: &[Scalar]) {
        if c.is_zero() || is_zero_vector(v) {
            return;
        }
        let field = c.field();
        let e = self
            .terms
            .entry(m.clone())
            .or_insert_with(|| vec![field.zero(); v.len()]);
        axpy(e, c, v);
        if is_zero_vector(e) {
            self.terms.remove(&m);
        }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &TateElement) {
        if other.is_zero() {
            return;
        }
        assert_eq!((self.hdeg, self.ideg), (other.hdeg, other.ideg), "bidegree mismatch");
        for (m, v) in &other.terms {
            self.add_term(m.clone(), c, v);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> TateElement {
        let mut out = TateElement::zero(self.hdeg, self.ideg);
        out.add_scaled(c, self);
        out
    }

    fn padded(&self, len: usize) -> TateElement {
        TateElement {
            hdeg: self.hdeg,
            ideg: self.ideg,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| {
                    let mut m = m.clone();
                    m.resize(len, 0);
                    (m, v.clone())
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TateVariable {
    pub name: String,
    pub hdeg: usize,
    pub ideg: usize,
    pub boundary: TateElement,
}

impl TateVariable {
    pub fn is_odd(&self) -> bool {
        self.hdeg % 2 == 1
    }
}

/// The closure through homological degree `top`, exposed both as a DG algebra and as a
/// free complex whose generators are the DP monomials.
#[derive(Clone, Debug)]
pub struct TateAlgebra {
    ring: Arc<RingPresentation>,
    variables: Vec<TateVariable>,
    monomials: Vec<Vec<DPMonomial>>,
    index: HashMap<DPMonomial, usize>,
    complex: FreeComplex,
    /// Set when the closure came from the explicit complete-intersection formulas.
    explicit_ci: bool,
    pub truncated: bool,
    pub notes: Vec<String>,
}

impl TateAlgebra {
    /// Assembles the algebra generated by `variables`, materializing monomials through `top`.
    pub fn from_variables(ring: Arc<RingPresentation>, variables: Vec<TateVariable>, top: usize) -> Self {
        let nv = variables.len();
        let variables: Vec<TateVariable> = variables
            .into_iter()
            .map(|mut v| {
                v.boundary = v.boundary.padded(nv);
                v
            })
            .collect();
        let bound = ring.bound();
        let mut monomials = vec![Vec::new(); top + 1];
        let mut cur = vec![0u32; nv];
        enumerate(&variables, 0, top, bound, 0, 0, &mut cur, &mut monomials);
        for ms in monomials.iter_mut() {
            ms.sort_by(|a, b| ideg_of(&variables, a).cmp(&ideg_of(&variables, b)).then(b.cmp(a)));
        }
        let mut index = HashMap::new();
        for ms in &monomials {
            for (j, m) in ms.iter().enumerate() {
                index.insert(m.clone(), j);
            }
        }
        let degrees: Vec<Vec<usize>> = monomials
            .iter()
            .map(|ms| ms.iter().map(|m| ideg_of(&variables, m)).collect())
            .collect();
        let shell = FreeComplex::new(ring.clone(), degrees.clone(), vec![Vec::new(); top + 1]);
        let mut alg = TateAlgebra {
            ring: ring.clone(),
            variables,
            monomials,
            index,
            complex: shell,
            explicit_ci: false,
            truncated: false,
            notes: Vec::new(),
        };
        let mut diff = vec![Vec::new()];
        for n in 1..=top {
            let col: Vec<Vector> = alg.monomials[n]
                .iter()
                .map(|m| alg.to_flat(&alg.boundary_of_monomial(m)))
                .collect();
            diff.push(col);
        }
        let labels = alg
            .monomials
            .iter()
            .map(|ms| ms.iter().map(|m| alg.monomial_label(m)).collect())
            .collect();
        alg.complex = FreeComplex::new(ring, degrees, diff).with_labels(labels);
        alg
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn variables(&self) -> &[TateVariable] {
        &self.variables
    }

    pub fn top(&self) -> usize {
        self.monomials.len() - 1
    }

    pub fn complex(&self) -> &FreeComplex {
        &self.complex
    }

    pub fn is_explicit_ci(&self) -> bool {
        self.explicit_ci
    }

    pub fn monomials(&self, n: usize) -> &[DPMonomial] {
        self.monomials.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn monomial_index(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn hdeg(&self, m: &[u32]) -> usize {
        m.iter()
            .zip(&self.variables)
            .map(|(&e, v)| e as usize * v.hdeg)
            .sum()
    }

    pub fn ideg(&self, m: &[u32]) -> usize {
        ideg_of(&self.variables, m)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn resolution(&self) -> Resolution {
        Resolution {
            complex: self.complex.clone(),
            truncated: self.truncated,
            notes: self.notes.clone(),
        }
    }

    /// `ℰ = Ext_R(k,k)` with basis dual to the DP monomials.
    pub fn ext_algebra(&self) -> ExtAlgebra {
        ExtAlgebra::from_resolution(self.resolution())
    }

    pub fn monomial_label(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.variables)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, v)| if e == 1 { v.name.clone() } else { format!("{}^({e})", v.name) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn element_string(&self, x: &TateElement) -> String {
        let terms: Vec<String> = x
            .terms
            .iter()
            .map(|(m, c)| {
                let d = x.ideg as usize - self.ideg(m);
                let coef = self.ring.element_string(d, c);
                let mono = self.monomial_label(m);
                match (coef.as_str(), mono.as_str()) {
                    (c, "1") => c.to_string(),
                    ("1", m) => m.to_string(),
                    (c, m) if c.contains('+') => format!("({c})*{m}"),
                    (c, m) => format!("{c}*{m}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn unit(&self) -> TateElement {
        self.monomial_element(&vec![0; self.variables.len()])
    }

    pub fn monomial_element(&self, m: &[u32]) -> TateElement {
        let mut x = TateElement::zero(self.hdeg(m), self.ideg(m) as i64);
        x.terms.insert(m.to_vec(), vec![self.field().one()]);
        x
    }

    pub fn variable_element(&self, v: usize) -> TateElement {
        let mut m = vec![0; self.variables.len()];
        m[v] = 1;
        self.monomial_element(&m)
    }

    /// `r · x` for a homogeneous `r ∈ R_d`.
    pub fn ring_multiple(&self, d: usize, r: &[Scalar], x: &TateElement) -> TateElement {
        let mut out = TateElement::zero(x.hdeg, x.ideg + d as i64);
        let one = self.field().one();
        for (m, c) in &x.terms {
            let cd = x.ideg as usize - self.ideg(m);
            if let Some(p) = self.ring.mul_homogeneous(cd, c, d, r) {
                out.add_term(m.clone(), &one, &p);
            }
        }
        out
    }

    /// Product of DP monomials: `(coefficient, monomial)`, `None` when it vanishes.
    pub fn monomial_product(&self, a: &[u32], b: &[u32]) -> Option<(Scalar, DPMonomial)> {
        let field = self.field();
        let mut coef = field.one();
        let mut out = Vec::with_capacity(a.len());
        let mut swaps = 0u64;
        let mut odd_in_a_after = 0u64;
        // count pairs (odd u in a, odd w in b) with u after w in the variable order
        for idx in (0..a.len()).rev() {
            let v = &self.variables[idx];
            if v.is_odd() {
                if b[idx] == 1 {
                    swaps += odd_in_a_after;
                }
                if a[idx] == 1 {
                    odd_in_a_after += 1;
                }
            }
        }
        for (idx, v) in self.variables.iter().enumerate() {
            let (i, j) = (a[idx], b[idx]);
            if v.is_odd() {
                if i + j > 1 {
                    return None;
                }
            } else if i > 0 && j > 0 {
                coef = coef * field.binomial((i + j) as u64, i as u64);
            }
            out.push(i + j);
        }
        if swaps % 2 == 1 {
            coef = -coef;
        }
        if coef.is_zero() {
            return None;
        }
        Some((coef, out))
    }

    pub fn mul(&self, x: &TateElement, y: &TateElement) -> TateElement {
        let mut out = TateElement::zero(x.hdeg + y.hdeg, x.ideg + y.ideg);
        for (a, ca) in &x.terms {
            let da = x.ideg as usize - self.ideg(a);
            for (b, cb) in &y.terms {
                let Some((c, m)) = self.monomial_product(a, b) else { continue };
                let db = y.ideg as usize - self.ideg(b);
                if let Some(p) = self.ring.mul_homogeneous(da, ca, db, cb) {
                    out.add_term(m, &c, &p);
                }
            }
        }
        out
    }

    /// Splits a non-unit monomial as `v^(e) · rest` with `v` its first variable.
    fn split_first(m: &[u32]) -> Option<(usize, u32, DPMonomial)> {
        let v = m.iter().position(|&e| e > 0)?;
        let mut rest = m.to_vec();
        let e = rest[v];
        rest[v] = 0;
        Some((v, e, rest))
    }

    fn lower_power(m: &[u32], v: usize) -> DPMonomial {
        let mut p = vec![0; m.len()];
        p[v] = m[v] - 1;
        p
    }

    pub fn boundary_of_monomial(&self, m: &[u32]) -> TateElement {
        let n = self.hdeg(m);
        let t = self.ideg(m) as i64;
        let Some((v, e, rest)) = Self::split_first(m) else {
            return TateElement::zero(0, t);
        };
        let field = self.field();
        let var = &self.variables[v];
        // ∂(v^(e)) = ∂(v)·v^(e−1)
        let dv = self.mul(&var.boundary, &self.monomial_element(&Self::lower_power(m, v)));
        let mut out = self.mul(&dv, &self.monomial_element(&rest));
        if rest.iter().any(|&x| x > 0) {
            let mut power = vec![0; m.len()];
            power[v] = e;
            let sign = field.sign((e as usize * var.hdeg) as i64);
            let tail = self.mul(&self.monomial_element(&power), &self.boundary_of_monomial(&rest));
            out.add_scaled(&sign, &tail);
        }
        debug_assert_eq!(out.hdeg, n - 1);
        out
    }

    pub fn boundary(&self, x: &TateElement) -> TateElement {
        let mut out = TateElement::zero(x.hdeg.saturating_sub(1), x.ideg);
        for (m, c) in &x.terms {
            if self.hdeg(m) == 0 {
                continue;
            }
            let d = x.ideg as usize - self.ideg(m);
            out.add_scaled(&self.field().one(), &self.ring_multiple(d, c, &self.boundary_of_monomial(m)));
        }
        out
    }

    /// Flat vector on the piece `(hdeg, ideg)` of the underlying complex.
    pub fn to_flat(&self, x: &TateElement) -> Vector {
        let piece = self.complex.piece(x.hdeg, x.ideg);
        let mut out = vec![self.field().zero(); piece.dim];
        for (m, c) in &x.terms {
            let Some(j) = self.monomial_index(m) else { continue };
            if let Some(st) = piece.start(j) {
                for (k, y) in c.iter().enumerate() {
                    out[st + k] = y.clone();
                }
            }
        }
        out
    }

    pub fn from_flat(&self, n: usize, t: i64, v: &[Scalar]) -> TateElement {
        let piece = self.complex.piece(n, t);
        let mut out = TateElement::zero(n, t);
        let one = self.field().one();
        for &(j, off, rd) in &piece.blocks {
            let c = &v[off..off + self.ring.dim(rd)];
            out.add_term(self.monomials[n][j].clone(), &one, c);
        }
        out
    }
}

fn ideg_of(vars: &[TateVariable], m: &[u32]) -> usize {
    m.iter().zip(vars).map(|(&e, v)| e as usize * v.ideg).sum()
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    vars: &[TateVariable],
    i: usize,
    top: usize,
    bound: usize,
    h: usize,
    t: usize,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<DPMonomial>>,
) {
    if i == vars.len() {
        out[h].push(cur.clone());
        return;
    }
    let v = &vars[i];
    let max_e = if v.is_odd() { 1 } else { u32::MAX };
    let mut e = 0u32;
    loop {
        let (hh, tt) = (h + e as usize * v.hdeg, t + e as usize * v.ideg);
        if hh > top || tt > bound || e > max_e {
            break;
        }
        cur[i] = e;
        enumerate(vars, i + 1, top, bound, hh, tt, cur, out);
        e += 1;
    }
    cur[i] = 0;
}

fn variable_name(hdeg: usize, k: usize) -> String {
    match hdeg {
        1 => format!("T{k}"),
        2 => format!("S{k}"),
        n => format!("U{n}_{k}"),
    }
}

/// Tate's construction through homological degree `top`. Complete intersections use the
/// explicit degree-2 cycles `Σ r̄_ijk ā_j x_k` read off the relations.
pub fn acyclic_closure(ring: &Arc<RingPresentation>, top: usize) -> Result<TateAlgebra> {
    let class = ring.classify()?;
    build_closure(ring, top, class.is_complete_intersection)
}

/// Tate's construction with representatives always chosen by row reduction.
pub fn acyclic_closure_generic(ring: &Arc<RingPresentation>, top: usize) -> Result<TateAlgebra> {
    ring.classify()?;
    build_closure(ring, top, false)
}

fn build_closure(ring: &Arc<RingPresentation>, top: usize, explicit_ci: bool) -> Result<TateAlgebra> {
    let e = ring.embedding_dimension();
    let bound = ring.bound();
    let mut vars: Vec<TateVariable> = (0..e)
        .map(|i| {
            let mut b = TateElement::zero(0, 1);
            b.terms.insert(vec![0; e], ring.variable(i));
            TateVariable {
                name: variable_name(1, i + 1),
                hdeg: 1,
                ideg: 1,
                boundary: b,
            }
        })
        .collect();
    let mut truncated = false;
    for n in 2..=top.max(1) {
        let stage = TateAlgebra::from_variables(ring.clone(), vars.clone(), n);
        let mut found: Vec<(usize, TateElement)> = Vec::new();
        if n == 2 && explicit_ci {
            found = explicit_ci_cycles(&stage)?;
        } else {
            for t in 0..=bound {
                let h = stage.complex.homology(n - 1, t as i64);
                for rep in &h.reps {
                    found.push((t, stage.from_flat(n - 1, t as i64, rep)));
                }
                if t == bound && h.dim() > 0 {
                    truncated = true;
                }
            }
        }
        let mut k = 0;
        for (t, b) in found {
            k += 1;
            vars.push(TateVariable {
                name: variable_name(n, k),
                hdeg: n,
                ideg: t,
                boundary: b,
            });
        }
    }
    let mut alg = TateAlgebra::from_variables(ring.clone(), vars, top);
    alg.explicit_ci = explicit_ci;
    alg.truncated = truncated;
    if truncated {
        alg.notes.push(format!(
            "homology found at the internal-degree bound {bound}; closure may be incomplete"
        ));
    }
    Ok(alg)
}

/// The cycles `Σ_{j≤k} r̄_ijk ā_j x_k` killing `H_1`, checked to form a basis of it.
fn explicit_ci_cycles(stage: &TateAlgebra) -> Result<Vec<(usize, TateElement)>> {
    let ring = stage.ring();
    let e = ring.embedding_dimension();
    let mut order: Vec<usize> = (0..ring.relations().len()).collect();
    order.sort_by_key(|&i| ring.relations()[i].degree);
    let mut out = Vec::new();
    for &i in &order {
        let deg = ring.relations()[i].degree;
        let mut z = TateElement::zero(1, deg as i64);
        for ((j, k), r) in ring.quadratic_coefficients(i) {
            let rj = ring.mul_homogeneous(deg - 2, &r, 1, &ring.variable(j)).expect("deg ≤ bound");
            let mut m = vec![0; e];
            m[k] = 1;
            z.add_term(m, &ring.field().one(), &rj);
        }
        out.push((deg, z));
    }
    let mut by_degree: BTreeMap<usize, Vec<&TateElement>> = BTreeMap::new();
    for (t, z) in &out {
        by_degree.entry(*t).or_default().push(z);
    }
    for t in 0..=ring.bound() {
        let h = stage.complex.homology(1, t as i64);
        let zs = by_degree.get(&t).cloned().unwrap_or_default();
        let mut coords = crate::matrix::Subspace::new(ring.field(), h.dim());
        for z in &zs {
            let flat = stage.to_flat(z);
            if !is_zero_vector(&stage.complex.apply_diff(1, t as i64, &flat)) {
                return Err(Error::ConventionViolation("explicit CI cycle is not a cycle".into()));
            }
            let c = h.coordinates(&flat).ok_or_else(|| {
                Error::ConventionViolation("explicit CI cycle outside the cycle space".into())
            })?;
            coords.insert(&c);
        }
        if coords.dim() != h.dim() || zs.len() != h.dim() {
            return Err(Error::Precondition(format!(
                "relations do not give a basis of H_1 in internal degree {t}"
            )));
        }
    }
    Ok(out)
}

/// An R-linear Γ-derivation of degree `−degree` and internal degree `−internal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaDerivation {
    pub degree: usize,
    pub internal: i64,
    /// Value on each variable.
    pub values: Vec<TateElement>,
}

/// Extends values on variables (unlisted ones map to zero) to a Γ-derivation.
pub fn extend_gamma_derivation(
    alg: &TateAlgebra,
    degree: usize,
    internal: i64,
    values: Vec<(usize, TateElement)>,
) -> Result<GammaDerivation> {
    let mut full: Vec<TateElement> = alg
        .variables()
        .iter()
        .map(|v| TateElement::zero(v.hdeg.saturating_sub(degree), v.ideg as i64 - internal))
        .collect();
    for (idx, val) in values {
        let v = alg.variables().get(idx).ok_or_else(|| {
            Error::DegreeMismatch(format!("no variable with index {idx}"))
        })?;
        if val.is_zero() {
            continue;
        }
        if v.hdeg < degree
            || val.hdeg != v.hdeg - degree
            || val.ideg != v.ideg as i64 - internal
        {
            return Err(Error::DegreeMismatch(format!(
                "value on {} has bidegree ({}, {}), expected ({}, {})",
                v.name,
                val.hdeg,
                val.ideg,
                v.hdeg as i64 - degree as i64,
                v.ideg as i64 - internal
            )));
        }
        full[idx] = val;
    }
    Ok(GammaDerivation {
        degree,
        internal,
        values: full,
    })
}

impl GammaDerivation {
    pub fn zero(alg: &TateAlgebra, degree: usize, internal: i64) -> Self {
        extend_gamma_derivation(alg, degree, internal, Vec::new()).expect("zero is consistent")
    }

    pub fn parity(&self) -> i64 {
        self.degree as i64
    }

    fn target_zero(&self, m_h: usize, m_t: usize) -> TateElement {
        TateElement::zero(m_h.saturating_sub(self.degree), m_t as i64 - self.internal)
    }

    /// `θ(y^(i)) = θ(y)·y^(i−1)` and `θ(ab) = θ(a)b + (−1)^{|θ||a|} aθ(b)`.
    pub fn apply_monomial(
        &self,
        alg: &TateAlgebra,
        m: &[u32],
        memo: &mut HashMap<DPMonomial, TateElement>,
    ) -> TateElement {
        if let Some(x) = memo.get(m) {
            return x.clone();
        }
        let (h, t) = (alg.hdeg(m), alg.ideg(m));
        let out = if h < self.degree {
            self.target_zero(h, t)
        } else {
            let (v, e, rest) = TateAlgebra::split_first(m).expect("h ≥ degree ≥ 1 or unit");
            let var = &alg.variables()[v];
            let first = alg.mul(&self.values[v], &alg.monomial_element(&TateAlgebra::lower_power(m, v)));
            let mut out = alg.mul(&first, &alg.monomial_element(&rest));
            if rest.iter().any(|&x| x > 0) {
                let mut power = vec![0; m.len()];
                power[v] = e;
                let sign = alg.field().sign(self.degree as i64 * e as i64 * var.hdeg as i64);
                let tail = alg.mul(&alg.monomial_element(&power), &self.apply_monomial(alg, &rest, memo));
                if !tail.is_zero() {
                    if out.is_zero() {
                        out = tail.scaled(&sign);
                    } else {
                        out.add_scaled(&sign, &tail);
                    }
                }
            }
            if out.is_zero() {
                self.target_zero(h, t)
            } else {
                out
            }
        };
        memo.insert(m.to_vec(), out.clone());
        out
    }

    pub fn apply(&self, alg: &TateAlgebra, x: &TateElement) -> TateElement {
        let mut memo = HashMap::new();
        self.apply_memo(alg, x, &mut memo)
    }

    pub fn apply_memo(
        &self,
        alg: &TateAlgebra,
        x: &TateElement,
        memo: &mut HashMap<DPMonomial, TateElement>,
    ) -> TateElement {
        let mut out = TateElement::zero(x.hdeg.saturating_sub(self.degree), x.ideg - self.internal);
        if x.hdeg < self.degree {
            return out;
        }
        let one = alg.field().one();
        for (m, c) in &x.terms {
            let d = x.ideg as usize - alg.ideg(m);
            let img = self.apply_monomial(alg, m, memo);
            if !img.is_zero() {
                out.add_scaled(&one, &alg.ring_multiple(d, c, &img));
            }
        }
        out
    }

    /// Images of all DP monomials, as a chain map `F_{p+i} → F_i` of internal degree `−s`.
    pub fn as_chain_map(&self, alg: &TateAlgebra) -> ChainMap {
        let mut memo = HashMap::new();
        let mut maps = Vec::new();
        for n in self.degree..=alg.top() {
            let col: Vec<Vector> = alg
                .monomials(n)
                .iter()
                .map(|m| alg.to_flat(&self.apply_monomial(alg, m, &mut memo)))
                .collect();
            maps.push(col);
        }
        ChainMap {
            shift: self.degree,
            internal: self.internal,
            maps,
        }
    }

    /// `[∂, θ] = ∂θ − (−1)^{|θ|}θ∂` evaluated on every variable.
    pub fn commutator_with_boundary(&self, alg: &TateAlgebra) -> Vec<TateElement> {
        let sign = alg.field().sign(self.parity());
        alg.variables()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut lhs = alg.boundary(&self.values[i]);
                let rhs = self.apply(alg, &v.boundary);
                if lhs.is_zero() {
                    lhs = TateElement::zero(rhs.hdeg, rhs.ideg);
                }
                lhs.add_scaled(&-sign.clone(), &rhs);
                lhs
            })
            .collect()
    }

    pub fn is_cycle(&self, alg: &TateAlgebra) -> bool {
        self.commutator_with_boundary(alg).iter().all(TateElement::is_zero)
    }

    /// The class `[ε∘θ] ∈ ℰ^{p}` in the basis dual to DP monomials.
    pub fn ext_class(&self, alg: &TateAlgebra, ext: &ExtAlgebra) -> CohomologyClass {
        let mut memo = HashMap::new();
        let basis = ext.basis(self.degree, self.internal);
        let coords = basis
            .iter()
            .map(|&j| {
                let m = &alg.monomials(self.degree)[j];
                let img = self.apply_monomial(alg, m, &mut memo);
                img.terms
                    .get(&vec![0; alg.variables().len()])
                    .map(|c| c[0].clone())
                    .unwrap_or_else(|| alg.field().zero())
            })
            .collect();
        ext.class(self.degree, self.internal, coords)
    }
}

fn values_from(alg: &TateAlgebra, degree: usize, internal: i64, f: impl Fn(&TateElement) -> TateElement) -> GammaDerivation {
    let values = alg
        .variables()
        .iter()
        .map(|v| {
            let x = f(&alg.variable_element(alg.variable_index(&v.name).expect("own variable")));
            if x.is_zero() {
                TateElement::zero(v.hdeg.saturating_sub(degree), v.ideg as i64 - internal)
            } else {
                x
            }
        })
        .collect();
    GammaDerivation {
        degree,
        internal,
        values,
    }
}

/// `[a,b] = ab − (−1)^{|a||b|}ba`, determined by its values on the variables.
pub fn bracket(alg: &TateAlgebra, a: &GammaDerivation, b: &GammaDerivation) -> GammaDerivation {
    let sign = alg.field().sign((a.degree * b.degree) as i64);
    values_from(alg, a.degree + b.degree, a.internal + b.internal, |v| {
        let mut x = a.apply(alg, &b.apply(alg, v));
        let y = b.apply(alg, &a.apply(alg, v));
        if x.is_zero() {
            x = TateElement::zero(y.hdeg, y.ideg);
        }
        if !y.is_zero() {
            x.add_scaled(&-sign.clone(), &y);
        }
        x
    })
}

/// `θ^[2] = θ∘θ` for odd `θ`, again a Γ-derivation since `θ(y)^2 = 0` for odd `θ(y)`.
pub fn square(alg: &TateAlgebra, a: &GammaDerivation) -> Result<GammaDerivation> {
    if a.degree.is_multiple_of(2) {
        return Err(Error::Precondition("the square is defined for odd derivations".into()));
    }
    Ok(values_from(alg, 2 * a.degree, 2 * a.internal, |v| a.apply(alg, &a.apply(alg, v))))
}

/// Basis of `π^n(R)`. Complete intersections built with the explicit closure use the closed
/// forms `ξ_t` (n = 1) and `χ_t` (n = 2); otherwise a cycle is solved for each variable of
/// degree `n`.
pub fn homotopy_lie_basis(alg: &TateAlgebra, n: usize) -> Result<Vec<GammaDerivation>> {
    if alg.is_explicit_ci() {
        return ci_basis(alg, n);
    }
    homotopy_lie_basis_generic(alg, n)
}

fn ci_basis(alg: &TateAlgebra, n: usize) -> Result<Vec<GammaDerivation>> {
    let ring = alg.ring();
    let e = ring.embedding_dimension();
    let field = alg.field();
    let ys: Vec<usize> = (0..alg.variables().len()).filter(|&i| alg.variables()[i].hdeg == 2).collect();
    let mut order: Vec<usize> = (0..ring.relations().len()).collect();
    order.sort_by_key(|&i| ring.relations()[i].degree);
    match n {
        1 => (0..e)
            .map(|t| {
                let mut vals = vec![(t, alg.unit())];
                for (pos, &yv) in ys.iter().enumerate() {
                    let i = order[pos];
                    let deg = ring.relations()[i].degree;
                    let mut val = TateElement::zero(1, deg as i64 - 1);
                    for ((j, k), r) in ring.quadratic_coefficients(i) {
                        if k == t {
                            let mut xj = TateElement::zero(1, 1);
                            xj.terms = alg.variable_element(j).terms;
                            val.add_scaled(&-field.one(), &alg.ring_multiple(deg - 2, &r, &xj));
                        }
                    }
                    vals.push((yv, val));
                }
                extend_gamma_derivation(alg, 1, 1, vals)
            })
            .collect(),
        2 => ys
            .iter()
            .map(|&yv| {
                let s = alg.variables()[yv].ideg as i64;
                extend_gamma_derivation(alg, 2, s, vec![(yv, alg.unit())])
            })
            .collect(),
        _ => Ok(Vec::new()),
    }
}

/// One cycle per variable `w` of degree `n`: `θ(w) = 1`, zero on the other variables of
/// degree ≤ n, and values on higher variables solved from `∂θ(v) = (−1)^n θ(∂v)`.
pub fn homotopy_lie_basis_generic(alg: &TateAlgebra, n: usize) -> Result<Vec<GammaDerivation>> {
    let field = alg.field();
    let sign = field.sign(n as i64);
    let mut solvers: HashMap<(usize, i64), Solver> = HashMap::new();
    let mut out = Vec::new();
    let order: Vec<usize> = {
        let mut o: Vec<usize> = (0..alg.variables().len()).collect();
        o.sort_by_key(|&i| alg.variables()[i].hdeg);
        o
    };
    for (w, var_w) in alg.variables().iter().enumerate() {
        if var_w.hdeg != n {
            continue;
        }
        let s = var_w.ideg as i64;
        let mut theta = extend_gamma_derivation(alg, n, s, vec![(w, alg.unit())])?;
        for &v in &order {
            let var = &alg.variables()[v];
            if var.hdeg <= n {
                continue;
            }
            let rhs = theta.apply(alg, &var.boundary).scaled(&sign);
            let (h, t) = (var.hdeg - n, var.ideg as i64 - s);
            if t < 0 {
                continue;
            }
            let solver = solvers
                .entry((h, t))
                .or_insert_with(|| Solver::new(&alg.complex().diff_matrix(h, t)));
            let rhs_flat = if rhs.is_zero() {
                alg.complex().zero(h - 1, t)
            } else {
                alg.to_flat(&rhs)
            };
            let x = solver.solve(&rhs_flat).ok_or_else(|| {
                Error::NoLift(format!("derivation value on {} not solvable", var.name))
            })?;
            theta.values[v] = alg.from_flat(h, t, &x);
        }
        out.push(theta);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_presentation;

    fn closure(s: &str, d: usize, top: usize) -> TateAlgebra {
        let r = Arc::new(parse_presentation(s, d).unwrap());
        acyclic_closure(&r, top).unwrap()
    }

    #[test]
    fn hypersurface_xy() {
        let a = closure("F101[x,y]/(x*y)", 10, 4);
        let names: Vec<&str> = a.variables().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, vec!["T1", "T2", "S1"]);
        assert_eq!(a.element_string(&a.variables()[2].boundary), "x*T2");
        assert_eq!(a.complex().betti(), vec![1, 2, 2, 2, 2]);
        assert!(a.complex().check_square_zero().is_ok());
        let g = acyclic_closure_generic(a.ring(), 4).unwrap();
        assert_eq!(g.element_string(&g.variables()[2].boundary), "x*T2");
    }

    #[test]
    fn complete_intersection_counts() {
        let a = closure("F101[x,y]/(x^3,y^3)", 12, 4);
        let by_deg: Vec<usize> = (1..=4)
            .map(|n| a.variables().iter().filter(|v| v.hdeg == n).count())
            .collect();
        assert_eq!(by_deg, vec![2, 2, 0, 0]);
        let b = closure("F101[x]/(x^2)", 10, 5);
        let by_deg: Vec<usize> = (1..=5)
            .map(|n| b.variables().iter().filter(|v| v.hdeg == n).count())
            .collect();
        assert_eq!(by_deg, vec![1, 1, 0, 0, 0]);
        assert_eq!(b.complex().betti(), vec![1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn example_derivation_values() {
        let a = closure("F101[x,y]/(x*y)", 10, 4);
        let f = a.field();
        // ξ(T1) = 0, ξ(T2) = 1, ξ(S) = −T1
        let xi = extend_gamma_derivation(
            &a,
            1,
            1,
            vec![(1, a.unit()), (2, a.variable_element(0).scaled(&-f.one()))],
        )
        .unwrap();
        let t2t1 = a.mul(&a.variable_element(1), &a.variable_element(0));
        assert_eq!(xi.apply(&a, &t2t1), a.variable_element(0));
        let s2 = a.monomial_element(&[0, 0, 2]);
        let expect = a.mul(&a.variable_element(0), &a.variable_element(2)).scaled(&-f.one());
        assert_eq!(xi.apply(&a, &s2), expect);
        let zero = GammaDerivation::zero(&a, 1, 1);
        assert!(zero.apply(&a, &s2).is_zero());
    }

    #[test]
    fn lie_basis_dims() {
        let a = closure("F101[x,y]/(x^3,y^3)", 12, 4);
        assert_eq!(homotopy_lie_basis(&a, 1).unwrap().len(), 2);
        assert_eq!(homotopy_lie_basis(&a, 2).unwrap().len(), 2);
        for th in homotopy_lie_basis(&a, 1).unwrap().iter().chain(&homotopy_lie_basis(&a, 2).unwrap()) {
            assert!(th.is_cycle(&a));
        }
        let h = closure("F101[x,y]/(x*y)", 10, 4);
        assert_eq!(homotopy_lie_basis(&h, 1).unwrap().len(), 2);
        assert_eq!(homotopy_lie_basis(&h, 2).unwrap().len(), 1);
        let m = closure("F101[x,y]/(x^2,x*y,y^2)", 6, 4);
        let p1 = homotopy_lie_basis(&m, 1).unwrap();
        assert_eq!(p1.len(), 2);
        for th in p1.iter().chain(&homotopy_lie_basis(&m, 2).unwrap()) {
            assert!(th.is_cycle(&m));
        }
        assert_eq!(m.complex().betti(), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn divided_power_rule() {
        let a = closure("Q[x]/(x^2)", 8, 6);
        let f = a.field();
        let s = a.monomial_element(&[0, 1]);
        let s2 = a.mul(&s, &s);
        assert_eq!(s2, a.monomial_element(&[0, 2]).scaled(&f.from_i64(2)));
        let s3 = a.mul(&s2, &s);
        assert_eq!(s3, a.monomial_element(&[0, 3]).scaled(&f.from_i64(6)));
    }
}
