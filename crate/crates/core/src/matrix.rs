//! Dense exact linear algebra: row reduction, kernels, linear solving and
//! incrementally built subspaces.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{pow_mod, Field, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows, rejecting ragged input or entries of another field.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for s in row {
                check_field(field, &s)?;
                data.push(s);
            }
        }
        Ok(Matrix {
            field,
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, rows).expect("rectangular integer matrix")
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: Field, rows: usize, columns: &[Vector]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![self.field.zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += a * x;
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + &(a * b);
                        out.set(i, j, cur);
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_uniform(&self) -> Result<()> {
        for s in &self.data {
            check_field(self.field, s)?;
        }
        Ok(())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (data, pivots) = match self.field {
            Field::Prime(p) => {
                let mut v: Vec<u64> = self.data.iter().map(residue).collect();
                let pivots = rref_generic(&PrimeArith(p), self.rows, self.cols, &mut v);
                let data = v
                    .into_iter()
                    .map(|value| Scalar::Mod { value, modulus: p })
                    .collect();
                (data, pivots)
            }
            Field::Rational => {
                let mut v: Vec<BigRational> = self.data.iter().map(|s| s.to_rational()).collect();
                let pivots = rref_generic(&RatArith, self.rows, self.cols, &mut v);
                (v.into_iter().map(Scalar::Rat).collect(), pivots)
            }
        };
        (
            Matrix {
                field: self.field,
                rows: self.rows,
                cols: self.cols,
                data,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column of the reduced form.
    pub fn kernel_basis(&self) -> Result<Vec<Vector>> {
        self.check_uniform()?;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free);
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Some `x` with `A x = b`, or `None` when `b` is outside the column space.
    pub fn solve_linear(&self, b: &[Scalar]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        self.check_uniform()?;
        for s in b {
            check_field(self.field, s)?;
        }
        Ok(Solver::new(self).solve(b))
    }
}

fn check_field(field: Field, s: &Scalar) -> Result<()> {
    if s.field() != field {
        return Err(Error::FieldMismatch {
            expected: field.to_string(),
            found: s.field().to_string(),
        });
    }
    Ok(())
}

fn residue(s: &Scalar) -> u64 {
    match s {
        Scalar::Mod { value, .. } => *value,
        Scalar::Rat(_) => unreachable!("field checked"),
    }
}

trait Arith {
    type E: Clone;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `a - f * b`
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Self::E;
}

struct PrimeArith(u64);

impl Arith for PrimeArith {
    type E = u64;
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> u64 {
        pow_mod(*a, self.0 - 2, self.0)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        (a + self.0 - f * b % self.0) % self.0
    }
}

struct RatArith;

impl Arith for RatArith {
    type E = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn sub_mul(&self, a: &BigRational, f: &BigRational, b: &BigRational) -> BigRational {
        a - f * b
    }
}

fn rref_generic<A: Arith>(ar: &A, rows: usize, cols: usize, v: &mut [A::E]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..cols {
        if prow >= rows {
            break;
        }
        let Some(found) = (prow..rows).find(|&r| !ar.is_zero(&v[r * cols + col])) else {
            continue;
        };
        if found != prow {
            for j in 0..cols {
                v.swap(found * cols + j, prow * cols + j);
            }
        }
        let inv = ar.inv(&v[prow * cols + col]);
        for j in col..cols {
            v[prow * cols + j] = ar.mul(&v[prow * cols + j], &inv);
        }
        let pivot_row: Vec<A::E> = v[prow * cols..(prow + 1) * cols].to_vec();
        let nz: Vec<usize> = (col..cols).filter(|&j| !ar.is_zero(&pivot_row[j])).collect();
        for r in 0..rows {
            if r == prow {
                continue;
            }
            let f = v[r * cols + col].clone();
            if ar.is_zero(&f) {
                continue;
            }
            for &j in &nz {
                v[r * cols + j] = ar.sub_mul(&v[r * cols + j], &f, &pivot_row[j]);
            }
        }
        pivots.push(col);
        prow += 1;
    }
    pivots
}

/// Precomputed row reduction of `A` for repeated solves of `A x = b`.
#[derive(Clone, Debug)]
pub struct Solver {
    field: Field,
    cols: usize,
    pivots: Vec<usize>,
    /// Row operations bringing `A` to reduced form.
    transform: Matrix,
}

impl Solver {
    pub fn new(a: &Matrix) -> Self {
        let field = a.field();
        let (rows, cols) = (a.rows(), a.cols());
        let mut aug = Matrix::zeros(field, rows, cols + rows);
        for i in 0..rows {
            for j in 0..cols {
                aug.set(i, j, a.get(i, j).clone());
            }
            aug.set(i, cols + i, field.one());
        }
        let (r, all_pivots) = aug.rref();
        let pivots: Vec<usize> = all_pivots.into_iter().filter(|&p| p < cols).collect();
        let mut transform = Matrix::zeros(field, rows, rows);
        for i in 0..rows {
            for j in 0..rows {
                transform.set(i, j, r.get(i, cols + j).clone());
            }
        }
        Solver {
            field,
            cols,
            pivots,
            transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        let c = self.transform.mul_vec(b).expect("shape checked");
        if c[self.pivots.len()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (row, &p) in self.pivots.iter().enumerate() {
            x[p] = c[row].clone();
        }
        Some(x)
    }
}

/// A subspace of `k^n` kept in reduced echelon form, grown one vector at a time.
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    rows: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: Field, ambient: usize) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by<'a>(field: Field, ambient: usize, vs: impl IntoIterator<Item = &'a Vector>) -> Self {
        let mut s = Self::new(field, ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.rows
    }

    /// Remainder of `v` after eliminating every pivot of the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("nonzero");
        let w: Vector = w.iter().map(|x| x * &inv).collect();
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, w);
        true
    }
}

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// `acc += c * v`
pub fn axpy(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += &(c * x);
        }
    }
}

pub fn scaled(c: &Scalar, v: &[Scalar]) -> Vector {
    v.iter().map(|x| c * x).collect()
}
