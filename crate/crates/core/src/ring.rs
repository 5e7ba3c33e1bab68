//! Standard graded rings `k[x1..xe]/I` materialized degree by degree up to a bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{axpy, is_zero_vector, Matrix, Vector};
use crate::parse::{parse_presentation_text, IntPoly};

pub type Monomial = Vec<u32>;

/// A homogeneous polynomial of the ambient polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub degree: usize,
    pub terms: Vec<(Monomial, Scalar)>,
}

#[derive(Clone, Debug)]
pub struct RingPresentation {
    field: Field,
    variables: Vec<String>,
    relations: Vec<Poly>,
    bound: usize,
    /// Degree-`d` monomials, descending in degree-lexicographic order.
    monomials: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
    /// Positions (into `monomials[d]`) of the standard monomials forming the basis of `R_d`.
    basis: Vec<Vec<usize>>,
    /// Normal form of every degree-`d` monomial over the basis of `R_d`.
    normal: Vec<Vec<Vector>>,
}

fn monomials_of_degree(e: usize, d: usize) -> Vec<Monomial> {
    if e == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials_of_degree(e - 1, d - first) {
            rest.insert(0, first as u32);
            out.push(rest);
        }
    }
    out
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl RingPresentation {
    /// Validates the relations and precomputes bases and normal forms through degree `bound`.
    pub fn new(field: Field, variables: Vec<String>, relations: Vec<IntPoly>, bound: usize) -> Result<Self> {
        let e = variables.len();
        let mut polys = Vec::new();
        for (index, rel) in relations.iter().enumerate() {
            let terms: Vec<(Monomial, Scalar)> = rel
                .iter()
                .rev()
                .map(|(m, c)| (m.clone(), field.from_bigint(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let Some(first) = terms.first() else {
                return Err(Error::Precondition(format!(
                    "relation {index} vanishes over {field}"
                )));
            };
            let degree = first.0.iter().sum::<u32>() as usize;
            if terms.iter().any(|(m, _)| m.iter().sum::<u32>() as usize != degree) {
                return Err(Error::Inhomogeneous { index });
            }
            if degree < 2 {
                return Err(Error::LowDegreeGenerator { index, degree });
            }
            polys.push(Poly { degree, terms });
        }
        let mut monomials = Vec::new();
        let mut index = Vec::new();
        let mut basis = Vec::new();
        let mut normal = Vec::new();
        for d in 0..=bound {
            let mons = monomials_of_degree(e, d);
            let idx: HashMap<Monomial, usize> =
                mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows = Vec::new();
            for f in polys.iter().filter(|f| f.degree <= d) {
                for m in monomials_of_degree(e, d - f.degree) {
                    let mut row = vec![field.zero(); mons.len()];
                    for (t, c) in &f.terms {
                        row[idx[&mono_mul(t, &m)]] += c;
                    }
                    rows.push(row);
                }
            }
            let (red, pivots) = if rows.is_empty() {
                (Matrix::zeros(field, 0, mons.len()), Vec::new())
            } else {
                Matrix::from_rows(field, rows)?.rref()
            };
            let mut pivot_row = vec![None; mons.len()];
            for (r, &p) in pivots.iter().enumerate() {
                pivot_row[p] = Some(r);
            }
            let std: Vec<usize> = (0..mons.len()).filter(|&c| pivot_row[c].is_none()).collect();
            let mut pos = vec![usize::MAX; mons.len()];
            for (b, &c) in std.iter().enumerate() {
                pos[c] = b;
            }
            let nf: Vec<Vector> = (0..mons.len())
                .map(|c| {
                    let mut v = vec![field.zero(); std.len()];
                    match pivot_row[c] {
                        None => v[pos[c]] = field.one(),
                        Some(r) => {
                            for (b, &s) in std.iter().enumerate() {
                                v[b] = -red.get(r, s);
                            }
                        }
                    }
                    v
                })
                .collect();
            monomials.push(mons);
            index.push(idx);
            basis.push(std);
            normal.push(nf);
        }
        Ok(RingPresentation {
            field,
            variables,
            relations: polys,
            bound,
            monomials,
            index,
            basis,
            normal,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Embedding dimension `e`.
    pub fn embedding_dimension(&self) -> usize {
        self.variables.len()
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// `dim R_d`, zero above the bound.
    pub fn dim(&self, d: usize) -> usize {
        self.basis.get(d).map_or(0, Vec::len)
    }

    /// Whether `R_d` is known exactly: below the bound, or anywhere once `R` has died out.
    pub fn is_exact_in(&self, d: usize) -> bool {
        d <= self.bound || self.dim(self.bound) == 0
    }

    pub fn component_basis(&self, d: usize) -> Result<Vec<Monomial>> {
        if d > self.bound {
            return Err(Error::Truncation {
                requested: d,
                bound: self.bound,
            });
        }
        Ok(self.basis[d]
            .iter()
            .map(|&c| self.monomials[d][c].clone())
            .collect())
    }

    pub fn hilbert_series(&self, up_to: usize) -> Result<Vec<usize>> {
        if up_to > self.bound {
            return Err(Error::Truncation {
                requested: up_to,
                bound: self.bound,
            });
        }
        Ok((0..=up_to).map(|d| self.dim(d)).collect())
    }

    /// Normal form of the product of basis elements `b_i ∈ R_d1` and `b_j ∈ R_d2`;
    /// `None` above the bound.
    pub fn basis_product(&self, d1: usize, i: usize, d2: usize, j: usize) -> Option<&Vector> {
        let d = d1 + d2;
        if d > self.bound {
            return None;
        }
        let m = mono_mul(
            &self.monomials[d1][self.basis[d1][i]],
            &self.monomials[d2][self.basis[d2][j]],
        );
        Some(&self.normal[d][self.index[d][&m]])
    }

    /// Normal form of an arbitrary monomial; `None` above the bound.
    pub fn monomial_normal_form(&self, m: &[u32]) -> Option<&Vector> {
        let d = m.iter().sum::<u32>() as usize;
        if d > self.bound {
            return None;
        }
        Some(&self.normal[d][self.index[d][m]])
    }

    /// Product of homogeneous pieces `a ∈ R_da`, `b ∈ R_db`; `None` above the bound.
    pub fn mul_homogeneous(&self, da: usize, a: &[Scalar], db: usize, b: &[Scalar]) -> Option<Vector> {
        if da + db > self.bound {
            return None;
        }
        let mut out = vec![self.field.zero(); self.dim(da + db)];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                let p = self.basis_product(da, i, db, j).expect("within bound");
                axpy(&mut out, &(x * y), p);
            }
        }
        Some(out)
    }

    /// Matrix of multiplication by `r ∈ R_a` from `R_t` to `R_{t+a}`.
    pub fn multiplication_matrix(&self, a: usize, r: &[Scalar], t: usize) -> Matrix {
        let rows = self.dim(t + a);
        let mut m = Matrix::zeros(self.field, rows, self.dim(t));
        if t + a > self.bound {
            return m;
        }
        for j in 0..self.dim(t) {
            let mut col = vec![self.field.zero(); rows];
            for (i, x) in r.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                axpy(&mut col, x, self.basis_product(a, i, t, j).expect("within bound"));
            }
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    /// The class of the variable `x_i` in `R_1`.
    pub fn variable(&self, i: usize) -> Vector {
        let mut m = vec![0; self.embedding_dimension()];
        m[i] = 1;
        self.monomial_normal_form(&m).expect("bound ≥ 1").clone()
    }

    pub fn multiply(&self, a: &RingElement, b: &RingElement) -> (RingElement, bool) {
        let mut out = RingElement::zero();
        let mut truncated = false;
        for (&da, va) in &a.components {
            for (&db, vb) in &b.components {
                match self.mul_homogeneous(da, va, db, vb) {
                    Some(p) => out.add_component(self.field, da + db, &p),
                    None => truncated |= !is_zero_vector(va) && !is_zero_vector(vb),
                }
            }
        }
        (out, truncated)
    }

    /// Writes `f_i = Σ_{j≤k} r_ijk x_j x_k` in the polynomial ring and returns the classes of
    /// the `r_ijk` in `R_{deg f_i − 2}`. Each monomial is split off at its two smallest
    /// variable indices, which makes the choice canonical.
    pub fn quadratic_coefficients(&self, i: usize) -> BTreeMap<(usize, usize), Vector> {
        let f = &self.relations[i];
        let d = f.degree - 2;
        let mut out: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for (m, c) in &f.terms {
            let j = m.iter().position(|&x| x > 0).expect("degree ≥ 2");
            let mut rest = m.clone();
            rest[j] -= 1;
            let k = rest.iter().position(|&x| x > 0).expect("degree ≥ 2");
            rest[k] -= 1;
            let Some(nf) = self.monomial_normal_form(&rest) else {
                continue;
            };
            let entry = out
                .entry((j, k))
                .or_insert_with(|| vec![self.field.zero(); self.dim(d)]);
            axpy(entry, c, nf);
        }
        out
    }

    pub fn monomial_string(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| {
                if x == 1 {
                    self.variables[i].clone()
                } else {
                    format!("{}^{x}", self.variables[i])
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    /// Human-readable form of a homogeneous element of `R_d`.
    pub fn element_string(&self, d: usize, v: &[Scalar]) -> String {
        let terms: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| {
                let m = self.monomial_string(&self.monomials[d][self.basis[d][b]]);
                if c.is_one() {
                    m
                } else {
                    format!("{c}*{m}")
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    /// Socle dimension in degree `t` (requires `t + 1 ≤ D`).
    fn socle_dim(&self, t: usize) -> usize {
        let e = self.embedding_dimension();
        let n = self.dim(t);
        if n == 0 {
            return 0;
        }
        let mut rows = Vec::new();
        for i in 0..e {
            let m = self.multiplication_matrix(1, &self.variable(i), t);
            for r in 0..m.rows() {
                rows.push(m.row(r).to_vec());
            }
        }
        if rows.is_empty() {
            return n;
        }
        n - Matrix::from_rows(self.field, rows).expect("uniform").rank()
    }

    pub fn classify(&self) -> Result<RingClass> {
        let e = self.embedding_dimension();
        let s = self.relations.len();
        if s == 0 {
            return Err(Error::Precondition(
                "regular ring (I = 0): the ring must be singular".into(),
            ));
        }
        let d_max = self.bound;
        let hilbert = self.hilbert_series(d_max)?;
        let mut notes = Vec::new();

        // ∏(1 − t^{deg f}) / (1 − t)^e truncated at D
        let mut expected = vec![0i64; d_max + 1];
        expected[0] = 1;
        for f in &self.relations {
            for k in (f.degree..=d_max).rev() {
                expected[k] -= expected[k - f.degree];
            }
        }
        for _ in 0..e {
            for k in 1..=d_max {
                expected[k] += expected[k - 1];
            }
        }
        let is_ci = expected
            .iter()
            .zip(&hilbert)
            .all(|(&a, &b)| a == b as i64);
        let vanish_at = hilbert.iter().position(|&h| h == 0);
        let artinian = match vanish_at {
            Some(_) => Some(true),
            None if is_ci => Some(s == e),
            None => None,
        };
        let krull = if is_ci {
            Some(e - s)
        } else if vanish_at.is_some() {
            Some(0)
        } else {
            // least j for which (1 − t)^j H(t) has a vanishing tail
            let mut g: Vec<i64> = hilbert.iter().map(|&h| h as i64).collect();
            let mut found = None;
            for j in 1..=e {
                for k in (1..g.len()).rev() {
                    g[k] -= g[k - 1];
                }
                let tail = 3.min(g.len().saturating_sub(2));
                if tail >= 2 && g[g.len() - tail..].iter().all(|&x| x == 0) {
                    found = Some(j);
                    break;
                }
            }
            if found.is_none() {
                notes.push(format!("Krull dimension not determined through degree {d_max}"));
            }
            found
        };
        if artinian.is_none() {
            notes.push(format!(
                "Hilbert series does not terminate through degree {d_max}; Artinian property undecided"
            ));
        }
        let socle = vanish_at.map(|top| (0..top).map(|t| self.socle_dim(t)).sum::<usize>());
        let is_ga = socle == Some(1);
        let is_m2_zero = d_max >= 2 && hilbert[1] == e && hilbert[2..].iter().all(|&h| h == 0);
        Ok(RingClass {
            embedding_dimension: e,
            relations: s,
            hilbert,
            is_m2_zero,
            is_hypersurface: is_ci && s == 1,
            is_complete_intersection: is_ci,
            is_gorenstein_artinian: is_ga,
            is_gorenstein: is_ci || is_ga,
            in_cube: self.relations.iter().all(|f| f.degree >= 3),
            codimension: krull.map(|d| e - d),
            krull_dimension: krull,
            socle_dimension: socle,
            status: if notes.is_empty() {
                ClassStatus::Conclusive
            } else {
                ClassStatus::Inconclusive(notes.join("; "))
            },
        })
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self
            .relations
            .iter()
            .map(|p| {
                let v: Vec<String> = p
                    .terms
                    .iter()
                    .map(|(m, c)| {
                        let s = self.monomial_string(m);
                        if c.is_one() {
                            s
                        } else {
                            format!("{c}*{s}")
                        }
                    })
                    .collect();
                v.join(" + ")
            })
            .collect();
        write!(f, "{}[{}]/({})", self.field, self.variables.join(","), rels.join(","))
    }
}

/// Parses `F<p>[vars]/(polys)` or `Q[vars]/(polys)` and materializes degrees `0..=bound`.
pub fn parse_presentation(text: &str, bound: usize) -> Result<RingPresentation> {
    let p = parse_presentation_text(text)?;
    RingPresentation::new(p.field, p.variables, p.relations, bound.max(2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum ClassStatus {
    Conclusive,
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RingClass {
    pub embedding_dimension: usize,
    pub relations: usize,
    pub hilbert: Vec<usize>,
    pub is_m2_zero: bool,
    pub is_hypersurface: bool,
    pub is_complete_intersection: bool,
    pub is_gorenstein_artinian: bool,
    pub is_gorenstein: bool,
    pub in_cube: bool,
    /// `e − dim R`
    pub codimension: Option<usize>,
    pub krull_dimension: Option<usize>,
    pub socle_dimension: Option<usize>,
    pub status: ClassStatus,
}

/// An element of `R` stored by homogeneous components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RingElement {
    components: BTreeMap<usize, Vector>,
}

impl RingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one(field: Field) -> Self {
        Self::homogeneous(0, vec![field.one()])
    }

    pub fn homogeneous(d: usize, v: Vector) -> Self {
        let mut components = BTreeMap::new();
        if !is_zero_vector(&v) {
            components.insert(d, v);
        }
        RingElement { components }
    }

    pub fn component(&self, d: usize) -> Option<&Vector> {
        self.components.get(&d)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &Vector)> {
        self.components.iter().map(|(d, v)| (*d, v))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add_component(&mut self, field: Field, d: usize, v: &[Scalar]) {
        let entry = self
            .components
            .entry(d)
            .or_insert_with(|| vec![field.zero(); v.len()]);
        axpy(entry, &field.one(), v);
        if is_zero_vector(entry) {
            self.components.remove(&d);
        }
    }

    pub fn add(&self, field: Field, other: &RingElement) -> RingElement {
        let mut out = self.clone();
        for (d, v) in other.components() {
            out.add_component(field, d, v);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> RingElement {
        let mut out = RingElement::zero();
        if c.is_zero() {
            return out;
        }
        for (d, v) in self.components() {
            out.components.insert(d, v.iter().map(|x| c * x).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> RingPresentation {
        parse_presentation(s, 8).unwrap()
    }

    #[test]
    fn component_bases() {
        let r = ring("F101[x,y]/(x^3,y^3)");
        assert_eq!(r.component_basis(0).unwrap(), vec![vec![0, 0]]);
        assert_eq!(r.component_basis(2).unwrap(), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(r.component_basis(4).unwrap(), vec![vec![2, 2]]);
        assert!(matches!(r.component_basis(9), Err(Error::Truncation { .. })));
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(
            ring("F101[x,y]/(x^2,x*y,y^2)").hilbert_series(4).unwrap(),
            vec![1, 2, 0, 0, 0]
        );
        assert_eq!(
            ring("F101[x,y]/(x^3,y^3)").hilbert_series(6).unwrap(),
            vec![1, 2, 3, 2, 1, 0, 0]
        );
        assert_eq!(ring("F101[x,y]/(x*y)").hilbert_series(5).unwrap(), vec![1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn products() {
        let r = ring("F101[x,y]/(x*y)");
        let f = r.field();
        let x = RingElement::homogeneous(1, r.variable(0));
        let y = RingElement::homogeneous(1, r.variable(1));
        assert!(r.multiply(&x, &y).0.is_zero());
        assert_eq!(r.multiply(&RingElement::one(f), &x).0, x);
        let c = ring("F101[x,y]/(x^3,y^3)");
        let x = RingElement::homogeneous(1, c.variable(0));
        let x2 = c.multiply(&x, &x).0;
        assert!(!x2.is_zero());
        assert!(c.multiply(&x2, &x).0.is_zero());
    }

    #[test]
    fn truncation_flag() {
        let r = parse_presentation("F101[x,y]/(x*y)", 3).unwrap();
        let x2 = RingElement::homogeneous(2, r.monomial_normal_form(&[2, 0]).unwrap().clone());
        let (p, flagged) = r.multiply(&x2, &x2);
        assert!(p.is_zero());
        assert!(flagged);
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(matches!(
            parse_presentation("F101[x,y]/(x^3,y^3,x-y)", 4),
            Err(Error::LowDegreeGenerator { index: 2, degree: 1 })
        ));
        assert!(matches!(
            parse_presentation("F101[x,y]/(x^3+y^2)", 4),
            Err(Error::Inhomogeneous { index: 0 })
        ));
        assert!(ring("F101[x,y]").classify().is_err());
    }

    #[test]
    fn classification_examples() {
        let c = ring("F101[x,y]/(x^3,y^3)").classify().unwrap();
        assert!(c.is_complete_intersection && c.is_gorenstein_artinian && c.in_cube);
        assert_eq!((c.codimension, c.krull_dimension), (Some(2), Some(0)));
        assert_eq!(c.status, ClassStatus::Conclusive);

        let m = ring("F101[x,y]/(x^2,x*y,y^2)").classify().unwrap();
        assert!(m.is_m2_zero && !m.is_gorenstein && !m.is_complete_intersection);
        assert_eq!(m.socle_dimension, Some(2));
        assert_eq!(m.relations, 3);

        let h = ring("F101[x,y]/(x*y)").classify().unwrap();
        assert!(h.is_hypersurface && h.is_complete_intersection && !h.in_cube);
        assert_eq!((h.codimension, h.krull_dimension), (Some(1), Some(1)));

        let g = ring("F101[x,y]/(x^2,x*y)").classify().unwrap();
        assert_eq!(g.krull_dimension, Some(1));
        assert!(!g.is_complete_intersection);
    }

    #[test]
    fn quadratic_split() {
        let r = ring("F101[x,y]/(x^3,x*y)");
        let q = r.quadratic_coefficients(0);
        assert_eq!(q.keys().copied().collect::<Vec<_>>(), vec![(0, 0)]);
        assert_eq!(q[&(0, 0)], r.variable(0));
        let q1 = r.quadratic_coefficients(1);
        assert_eq!(q1[&(0, 1)], vec![r.field().one()]);
    }
}
