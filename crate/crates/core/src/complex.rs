//! Graded free complexes over a materialized ring, handled one bidegree at a time.
//!
//! An element of `F_n` of internal degree `t` is a flat vector over the piece
//! `(F_n)_t = ⊕_j R_{t − a_j}`, blocks ordered by generator index.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{axpy, is_zero_vector, Matrix, Solver, Subspace, Vector};
use crate::ring::RingPresentation;

#[derive(Clone, Debug)]
pub struct Piece {
    /// `(generator, offset, ring degree)` for every generator contributing to the piece.
    pub blocks: Vec<(usize, usize, usize)>,
    pub dim: usize,
    starts: Vec<Option<usize>>,
}

impl Piece {
    pub fn start(&self, gen: usize) -> Option<usize> {
        self.starts.get(gen).copied().flatten()
    }
}

#[derive(Clone, Debug)]
pub struct FreeComplex {
    ring: Arc<RingPresentation>,
    degrees: Vec<Vec<usize>>,
    /// `diff[n][j]` is `∂ g_j` on the piece `(n − 1, a_j)`; empty for `n = 0`.
    diff: Vec<Vec<Vector>>,
    labels: Vec<Vec<String>>,
}

impl FreeComplex {
    pub fn new(ring: Arc<RingPresentation>, degrees: Vec<Vec<usize>>, diff: Vec<Vec<Vector>>) -> Self {
        let labels = degrees
            .iter()
            .enumerate()
            .map(|(n, g)| (0..g.len()).map(|j| format!("g{n}_{j}")).collect())
            .collect();
        FreeComplex {
            ring,
            degrees,
            diff,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Self {
        self.labels = labels;
        self
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    /// Highest homological degree with stored generators.
    pub fn top(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn rank(&self, n: usize) -> usize {
        self.degrees.get(n).map_or(0, Vec::len)
    }

    pub fn degrees(&self, n: usize) -> &[usize] {
        self.degrees.get(n).map_or(&[], |v| v.as_slice())
    }

    pub fn gen_degree(&self, n: usize, j: usize) -> usize {
        self.degrees[n][j]
    }

    pub fn label(&self, n: usize, j: usize) -> &str {
        &self.labels[n][j]
    }

    pub fn boundary_of_generator(&self, n: usize, j: usize) -> &Vector {
        &self.diff[n][j]
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(Vec::len).collect()
    }

    pub fn piece(&self, n: usize, t: i64) -> Piece {
        let gens = self.degrees(n);
        let mut starts = vec![None; gens.len()];
        let mut blocks = Vec::new();
        let mut dim = 0;
        if t >= 0 {
            let t = t as usize;
            for (j, &a) in gens.iter().enumerate() {
                if a <= t {
                    let d = self.ring.dim(t - a);
                    if d > 0 {
                        starts[j] = Some(dim);
                        blocks.push((j, dim, t - a));
                        dim += d;
                    }
                }
            }
        }
        Piece { blocks, dim, starts }
    }

    pub fn zero(&self, n: usize, t: i64) -> Vector {
        vec![self.field().zero(); self.piece(n, t).dim]
    }

    /// The generator `g_j` of `F_n` as an element of `(F_n)_{a_j}`.
    pub fn generator(&self, n: usize, j: usize) -> Vector {
        let a = self.degrees[n][j] as i64;
        let p = self.piece(n, a);
        let mut v = vec![self.field().zero(); p.dim];
        v[p.start(j).expect("R_0 = k")] = self.field().one();
        v
    }

    /// `out += r · v` with `v ∈ (F_n)_u` and `r ∈ R_d`, so `out ∈ (F_n)_{u+d}`.
    pub fn mul_ring_into(&self, n: usize, u: i64, v: &[Scalar], d: usize, r: &[Scalar], out: &mut [Scalar]) {
        if is_zero_vector(r) || is_zero_vector(v) {
            return;
        }
        let src = self.piece(n, u);
        let dst = self.piece(n, u + d as i64);
        for &(j, off, rd) in &src.blocks {
            let Some(o2) = dst.start(j) else { continue };
            for q in 0..self.ring.dim(rd) {
                let c = &v[off + q];
                if c.is_zero() {
                    continue;
                }
                for (p, x) in r.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    let prod = self.ring.basis_product(rd, q, d, p).expect("within bound");
                    let cx = c * x;
                    for (k, y) in prod.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                        out[o2 + k] += &(&cx * y);
                    }
                }
            }
        }
    }

    /// Applies an R-linear map given on generators: `image(j)` is the image of `g_j`,
    /// living in `(target_m)_{a_j + shift}`. The result lies in `(target_m)_{t + shift}`.
    #[allow(clippy::too_many_arguments)]
    pub fn apply_map<'a>(
        &self,
        n: usize,
        t: i64,
        v: &[Scalar],
        target: &FreeComplex,
        m: usize,
        shift: i64,
        image: impl Fn(usize) -> Option<&'a Vector>,
    ) -> Vector {
        let mut out = target.zero(m, t + shift);
        let src = self.piece(n, t);
        for &(j, off, rd) in &src.blocks {
            let c = &v[off..off + self.ring.dim(rd)];
            if is_zero_vector(c) {
                continue;
            }
            let Some(img) = image(j) else { continue };
            let a = self.degrees[n][j] as i64;
            target.mul_ring_into(m, a + shift, img, rd, c, &mut out);
        }
        out
    }

    /// `∂ v` for `v ∈ (F_n)_t`; zero for `n = 0`.
    pub fn apply_diff(&self, n: usize, t: i64, v: &[Scalar]) -> Vector {
        if n == 0 || n > self.top() {
            return if n == 0 { Vec::new() } else { self.zero(n - 1, t) };
        }
        self.apply_map(n, t, v, self, n - 1, 0, |j| Some(&self.diff[n][j]))
    }

    /// Matrix of `∂_n : (F_n)_t → (F_{n−1})_t`.
    pub fn diff_matrix(&self, n: usize, t: i64) -> Matrix {
        let src = self.piece(n, t);
        let rows = if n == 0 { 0 } else { self.piece(n - 1, t).dim };
        let mut cols = Vec::with_capacity(src.dim);
        for k in 0..src.dim {
            let mut e = vec![self.field().zero(); src.dim];
            e[k] = self.field().one();
            cols.push(if n == 0 || n > self.top() {
                vec![self.field().zero(); rows]
            } else {
                self.apply_diff(n, t, &e)
            });
        }
        Matrix::from_columns(self.field(), rows, &cols)
    }

    /// Coefficients on the generators of internal degree exactly `t` (the image in `k ⊗ F`).
    pub fn constant_part(&self, n: usize, t: i64, v: &[Scalar]) -> Vec<(usize, Scalar)> {
        let p = self.piece(n, t);
        p.blocks
            .iter()
            .filter(|&&(_, _, rd)| rd == 0)
            .map(|&(j, off, _)| (j, v[off].clone()))
            .collect()
    }

    /// Verifies `∂∘∂ = 0` on every generator.
    pub fn check_square_zero(&self) -> Result<()> {
        for n in 2..=self.top() {
            for j in 0..self.rank(n) {
                let a = self.degrees[n][j] as i64;
                let dd = self.apply_diff(n - 1, a, &self.diff[n][j]);
                if !is_zero_vector(&dd) {
                    return Err(Error::ConventionViolation(format!(
                        "d^2 != 0 on generator {j} of degree {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// No differential entry is a unit.
    pub fn is_minimal(&self) -> bool {
        (1..=self.top()).all(|n| {
            (0..self.rank(n)).all(|j| {
                let a = self.degrees[n][j] as i64;
                self.constant_part(n - 1, a, &self.diff[n][j])
                    .iter()
                    .all(|(_, c)| c.is_zero())
            })
        })
    }

    /// Homology at `(n, t)`, valid when `n + 1 ≤ top` or the complex stops at `n`.
    pub fn homology(&self, n: usize, t: i64) -> HomologyPiece {
        let field = self.field();
        let dim = self.piece(n, t).dim;
        let z = if n == 0 {
            (0..dim)
                .map(|k| {
                    let mut e = vec![field.zero(); dim];
                    e[k] = field.one();
                    e
                })
                .collect()
        } else {
            self.diff_matrix(n, t).kernel_basis().expect("uniform field")
        };
        let bmat = self.diff_matrix(n + 1, t);
        let mut boundaries = Subspace::new(field, dim);
        for c in 0..bmat.cols() {
            boundaries.insert(&bmat.column(c));
        }
        let bdim = boundaries.dim();
        let mut span = boundaries.clone();
        let mut reps = Vec::new();
        for v in z {
            if span.insert(&v) {
                reps.push(boundaries.reduce(&v));
            }
        }
        HomologyPiece::new(field, dim, reps, boundaries.basis().to_vec(), bdim)
    }
}

/// One bidegree of homology with chosen representatives and a reducer.
#[derive(Clone, Debug)]
pub struct HomologyPiece {
    pub reps: Vec<Vector>,
    pub boundary_dim: usize,
    solver: Solver,
    ambient: usize,
}

impl HomologyPiece {
    pub fn new(field: Field, ambient: usize, reps: Vec<Vector>, boundaries: Vec<Vector>, boundary_dim: usize) -> Self {
        let cols: Vec<Vector> = reps.iter().chain(&boundaries).cloned().collect();
        let solver = Solver::new(&Matrix::from_columns(field, ambient, &cols));
        HomologyPiece {
            reps,
            boundary_dim,
            solver,
            ambient,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of a cycle's class; `None` when `v` is not in cycles.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient);
        self.solver.solve(v).map(|x| x[..self.reps.len()].to_vec())
    }
}

/// `F ⊗_R G` truncated at homological degree `top`, with the generator index of each pair.
#[derive(Clone, Debug)]
pub struct TensorComplex {
    pub complex: FreeComplex,
    /// `pairs[n][k] = (i, f, g)`: generator `f` of `F_i` tensor generator `g` of `G_{n−i}`.
    pub pairs: Vec<Vec<(usize, usize, usize)>>,
    lookup: Vec<std::collections::HashMap<(usize, usize, usize), usize>>,
}

impl TensorComplex {
    pub fn index(&self, n: usize, i: usize, f: usize, g: usize) -> Option<usize> {
        self.lookup.get(n)?.get(&(i, f, g)).copied()
    }
}

/// Builds `F ⊗_R G` with `∂(f⊗g) = ∂f⊗g + (−1)^{|f|} f⊗∂g`.
pub fn tensor(f: &FreeComplex, g: &FreeComplex, top: usize) -> TensorComplex {
    let ring = f.ring().clone();
    let field = ring.field();
    let top = top.min(f.top() + g.top());
    let mut pairs = Vec::new();
    let mut lookup = Vec::new();
    let mut degrees = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=top {
        let mut ps = Vec::new();
        let mut map = std::collections::HashMap::new();
        let mut ds = Vec::new();
        let mut ls = Vec::new();
        for i in 0..=n.min(f.top()) {
            if n - i > g.top() {
                continue;
            }
            for fi in 0..f.rank(i) {
                for gj in 0..g.rank(n - i) {
                    map.insert((i, fi, gj), ps.len());
                    ps.push((i, fi, gj));
                    ds.push(f.gen_degree(i, fi) + g.gen_degree(n - i, gj));
                    ls.push(format!("{}⊗{}", f.label(i, fi), g.label(n - i, gj)));
                }
            }
        }
        pairs.push(ps);
        lookup.push(map);
        degrees.push(ds);
        labels.push(ls);
    }
    let shell = FreeComplex::new(ring.clone(), degrees.clone(), vec![Vec::new(); top + 1]);
    let mut diff = vec![Vec::new()];
    for n in 1..=top {
        let mut col = Vec::new();
        for (k, &(i, fi, gj)) in pairs[n].iter().enumerate() {
            let a = degrees[n][k] as i64;
            let mut out = shell.zero(n - 1, a);
            let target = shell.piece(n - 1, a);
            let (af, ag) = (f.gen_degree(i, fi) as i64, g.gen_degree(n - i, gj) as i64);
            if i > 0 {
                let df = f.boundary_of_generator(i, fi);
                let p = f.piece(i - 1, af);
                for &(h, off, rd) in &p.blocks {
                    let c = &df[off..off + ring.dim(rd)];
                    if is_zero_vector(c) {
                        continue;
                    }
                    let idx = lookup[n - 1][&(i - 1, h, gj)];
                    let st = target.start(idx).expect("degree fits");
                    for (q, x) in c.iter().enumerate() {
                        out[st + q] += x;
                    }
                }
            }
            if n - i > 0 {
                let dg = g.boundary_of_generator(n - i, gj);
                let p = g.piece(n - i - 1, ag);
                let sign = field.sign(i as i64);
                for &(h, off, rd) in &p.blocks {
                    let c = &dg[off..off + ring.dim(rd)];
                    if is_zero_vector(c) {
                        continue;
                    }
                    let idx = lookup[n - 1][&(i, fi, h)];
                    let st = target.start(idx).expect("degree fits");
                    axpy(&mut out[st..st + c.len()], &sign, c);
                }
            }
            col.push(out);
        }
        diff.push(col);
    }
    TensorComplex {
        complex: FreeComplex::new(ring, degrees, diff).with_labels(labels),
        pairs,
        lookup,
    }
}
