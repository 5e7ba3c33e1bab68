// Randomized checks shared by the proptest suites and the acceptance target.
#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabcoh::bimodule::{
    apply_chi, apply_cochain, apply_omega, combined_action_value, compose_cochain, right_action_terms, DualTor,
};
use stabcoh::resolution::{CohomologyClass, ExtAlgebra, ExtKR, ModuleSpec};
use stabcoh::ring::parse_presentation;
use stabcoh::tate::{acyclic_closure, bracket, square, TateAlgebra, TateElement};
use stabcoh::tor::{pi_generators, PiGenerator, TorModule};
use stabcoh::{Field, Scalar};

pub type Check = std::result::Result<(), String>;

pub const TOP: usize = 4;
pub const RINGS: [&str; 3] = ["F101[x,y]/(x^3,y^3)", "F101[x,y]/(x*y)", "F101[x,y]/(x^2,x*y,y^2)"];

pub struct Fixture {
    pub ring: &'static str,
    pub alg: Arc<TateAlgebra>,
    pub tor: TorModule,
    pub ext: ExtAlgebra,
    pub dual: DualTor,
    /// π generators of degrees 1 and 2.
    pub gens: Vec<PiGenerator>,
}

fn build(ring: &'static str) -> Fixture {
    let r = Arc::new(parse_presentation(ring, 12).expect("ring"));
    let alg = Arc::new(acyclic_closure(&r, TOP).expect("closure"));
    let tor = TorModule::residue(alg.clone(), TOP).expect("tor");
    let dual = DualTor::new(alg.clone(), &ModuleSpec::Residue, TOP).expect("dual");
    let mut gens = pi_generators(&alg, 1).expect("π1");
    gens.extend(pi_generators(&alg, 2).expect("π2"));
    Fixture {
        ring,
        ext: alg.ext_algebra(),
        alg,
        tor,
        dual,
        gens,
    }
}

pub fn fixtures() -> &'static [Fixture] {
    static ALL: OnceLock<Vec<Fixture>> = OnceLock::new();
    ALL.get_or_init(|| RINGS.iter().map(|r| build(r)).collect())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scalar(rng: &mut ChaCha8Rng, field: &Field) -> Scalar {
    field.from_i64(rng.gen_range(-30..=30))
}

fn vector(rng: &mut ChaCha8Rng, field: &Field, len: usize) -> Vec<Scalar> {
    (0..len).map(|_| scalar(rng, field)).collect()
}

/// A random nonempty internal degree of the chains `(F⊗G)_n`.
fn chain_degree(fx: &Fixture, rng: &mut ChaCha8Rng, n: usize) -> Option<i64> {
    let tc = &fx.tor.tensor().complex;
    let ts: Vec<i64> = (0..=(3 * n as i64 + 6)).filter(|&t| tc.piece(n, t).dim > 0).collect();
    ts.choose(rng).copied()
}

fn monomial(alg: &TateAlgebra, rng: &mut ChaCha8Rng, n: usize) -> Option<TateElement> {
    alg.monomials(n).choose(rng).map(|m| alg.monomial_element(m))
}

/// Zero elements carry no reliable degrees; the callers only need degrees of nonzero ones.
fn or_zero(v: Vec<Scalar>, len: usize, field: &Field) -> Vec<Scalar> {
    if v.len() == len {
        v
    } else {
        vec![field.zero(); len]
    }
}

fn sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(c: &Scalar, v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| c * x).collect()
}

fn add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

// ---- DG Lie module axioms on chains of F⊗F ----

/// `∂(m·θ) = (∂m)·θ`
pub fn dg_boundary(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let th = fx.gens.choose(rng).unwrap();
    let p = th.chain.shift;
    let n = rng.gen_range(p + 1..=TOP);
    let Some(t) = chain_degree(fx, rng, n) else { return Ok(()) };
    let tc = &fx.tor.tensor().complex;
    let field = fx.alg.field();
    let m = vector(rng, &field, tc.piece(n, t).dim);
    let mt = fx.tor.right_action_on_chain(n, t, &m, &th.chain).map_err(|e| e.to_string())?;
    let lhs = tc.apply_diff(n - p, t - th.chain.internal, &mt);
    let dm = tc.apply_diff(n, t, &m);
    let rhs = fx.tor.right_action_on_chain(n - 1, t, &dm, &th.chain).map_err(|e| e.to_string())?;
    if lhs != or_zero(rhs, lhs.len(), &field) {
        return Err(format!("{}: ∂(m·{}) ≠ (∂m)·{} at ({n},{t})", fx.ring, th.name, th.name));
    }
    Ok(())
}

/// `m·[θ,ξ] = (m·θ)·ξ − (−1)^{|θ||ξ|}(m·ξ)·θ`
pub fn dg_bracket(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let th = fx.gens.choose(rng).unwrap();
    let xi = fx.gens.choose(rng).unwrap();
    let (p, q) = (th.chain.shift, xi.chain.shift);
    if p + q > TOP {
        return Ok(());
    }
    let n = rng.gen_range(p + q..=TOP);
    let Some(t) = chain_degree(fx, rng, n) else { return Ok(()) };
    let alg = &fx.alg;
    let field = alg.field();
    let tor = &fx.tor;
    let m = vector(rng, &field, tor.tensor().complex.piece(n, t).dim);
    let br = bracket(alg, &th.derivation, &xi.derivation).as_chain_map(alg);
    let err = |e: stabcoh::Error| e.to_string();
    let lhs = tor.right_action_on_chain(n, t, &m, &br).map_err(err)?;
    let mt = tor.right_action_on_chain(n, t, &m, &th.chain).map_err(err)?;
    let mtx = tor.right_action_on_chain(n - p, t - th.chain.internal, &mt, &xi.chain).map_err(err)?;
    let mx = tor.right_action_on_chain(n, t, &m, &xi.chain).map_err(err)?;
    let mxt = tor.right_action_on_chain(n - q, t - xi.chain.internal, &mx, &th.chain).map_err(err)?;
    let len = lhs.len();
    let sign = field.sign((p * q) as i64);
    let rhs = sub(&or_zero(mtx, len, &field), &scale(&sign, &or_zero(mxt, len, &field)));
    if lhs != rhs {
        return Err(format!("{}: m·[{},{}] mismatch at ({n},{t})", fx.ring, th.name, xi.name));
    }
    Ok(())
}

/// `m·θ^[2] = (m·θ)·θ` for odd `θ`
pub fn dg_square(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let odd: Vec<&PiGenerator> = fx.gens.iter().filter(|g| g.chain.shift % 2 == 1).collect();
    let th = *odd.choose(rng).unwrap();
    let p = th.chain.shift;
    let n = rng.gen_range(2 * p..=TOP);
    let Some(t) = chain_degree(fx, rng, n) else { return Ok(()) };
    let alg = &fx.alg;
    let field = alg.field();
    let tor = &fx.tor;
    let m = vector(rng, &field, tor.tensor().complex.piece(n, t).dim);
    let sq = square(alg, &th.derivation).map_err(|e| e.to_string())?.as_chain_map(alg);
    let lhs = tor.right_action_on_chain(n, t, &m, &sq).map_err(|e| e.to_string())?;
    let mt = tor.right_action_on_chain(n, t, &m, &th.chain).map_err(|e| e.to_string())?;
    let rhs = tor.right_action_on_chain(n - p, t - th.chain.internal, &mt, &th.chain).map_err(|e| e.to_string())?;
    if lhs != or_zero(rhs, lhs.len(), &field) {
        return Err(format!("{}: m·{}^[2] ≠ (m·{})·{} at ({n},{t})", fx.ring, th.name, th.name, th.name));
    }
    Ok(())
}

// ---- divided powers and Yoneda products ----

/// Graded commutativity and associativity of DP monomials, and the divided power rule
/// `y^(i) y^(j) = C(i+j,i) y^(i+j)` on even variables.
pub fn divided_powers(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let alg = &fx.alg;
    let field = alg.field();
    let n1 = rng.gen_range(0..=TOP);
    let n2 = rng.gen_range(0..=TOP - n1);
    let n3 = rng.gen_range(0..=TOP - n1 - n2);
    let (Some(a), Some(b), Some(c)) = (monomial(alg, rng, n1), monomial(alg, rng, n2), monomial(alg, rng, n3)) else {
        return Ok(());
    };
    let ab = alg.mul(&a, &b);
    let ba = alg.mul(&b, &a).scaled(&field.sign((n1 * n2) as i64));
    if !(ab.is_zero() && ba.is_zero()) && ab != ba {
        return Err(format!("{}: DP product not graded-commutative", fx.ring));
    }
    let l = alg.mul(&ab, &c);
    let r = alg.mul(&a, &alg.mul(&b, &c));
    if !(l.is_zero() && r.is_zero()) && l != r {
        return Err(format!("{}: DP product not associative", fx.ring));
    }
    for (v, var) in alg.variables().iter().enumerate() {
        if var.is_odd() || var.hdeg > TOP {
            continue;
        }
        let cap = (TOP / var.hdeg) as u32;
        let i = rng.gen_range(0..=cap);
        let j = rng.gen_range(0..=cap - i);
        let mono = |e: u32| {
            let mut m = vec![0u32; alg.variables().len()];
            m[v] = e;
            m
        };
        let got = alg.monomial_product(&mono(i), &mono(j));
        let want = field.binomial((i + j) as u64, i as u64);
        match got {
            Some((coef, m)) if coef == want && m == mono(i + j) => {}
            None if want.is_zero() => {}
            _ => return Err(format!("{}: {}^({i})·{}^({j}) ≠ C({},{i}){}^({})", fx.ring, var.name, var.name, i + j, var.name, i + j)),
        }
    }
    Ok(())
}

/// Over `Q` the divided powers are ordinary powers divided by factorials.
pub fn divided_powers_rational(rng: &mut ChaCha8Rng) -> Check {
    static ALG: OnceLock<TateAlgebra> = OnceLock::new();
    let alg = ALG.get_or_init(|| {
        let r = Arc::new(parse_presentation("Q[x,y]/(x*y)", 12).unwrap());
        acyclic_closure(&r, 8).unwrap()
    });
    let field = alg.field();
    let s = alg.variables().iter().position(|v| !v.is_odd()).expect("even variable");
    let i = rng.gen_range(1..=4u32);
    let y = alg.variable_element(s);
    let mut pow = alg.unit();
    let mut fact = field.one();
    for k in 1..=i {
        pow = alg.mul(&pow, &y);
        fact = fact * field.from_i64(k as i64);
    }
    let mut m = vec![0u32; alg.variables().len()];
    m[s] = i;
    if pow != alg.monomial_element(&m).scaled(&fact) {
        return Err(format!("S^{i} ≠ {i}!·S^({i})"));
    }
    Ok(())
}

fn random_ext_class(fx: &Fixture, rng: &mut ChaCha8Rng, n: usize) -> Option<CohomologyClass> {
    let field = fx.ext.field();
    let ss: Vec<i64> = fx.ext.internal_degrees(n).into_iter().filter(|&s| !fx.ext.basis(n, s).is_empty()).collect();
    let s = *ss.choose(rng)?;
    let d = fx.ext.basis(n, s).len();
    Some(fx.ext.class(n, s, vector(rng, &field, d)))
}

/// `(ab)c = a(bc)` in `Ext_R(k,k)`.
pub fn yoneda_associative(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let n1 = rng.gen_range(0..=TOP);
    let n2 = rng.gen_range(0..=TOP - n1);
    let n3 = rng.gen_range(0..=TOP - n1 - n2);
    let (Some(a), Some(b), Some(c)) = (
        random_ext_class(fx, rng, n1),
        random_ext_class(fx, rng, n2),
        random_ext_class(fx, rng, n3),
    ) else {
        return Ok(());
    };
    let err = |e: stabcoh::Error| e.to_string();
    let l = fx.ext.product(&fx.ext.product(&a, &b).map_err(err)?, &c).map_err(err)?;
    let r = fx.ext.product(&a, &fx.ext.product(&b, &c).map_err(err)?).map_err(err)?;
    if l != r {
        return Err(format!("{}: Yoneda product not associative in degrees {n1},{n2},{n3}", fx.ring));
    }
    Ok(())
}

// ---- Ext_R(k,R) ⊗ F ⊗ G and the maps ω, χ ----

/// A random cochain of `Hom(F_i, R)_s`, as `(s, φ)`.
fn random_cochain(fx: &Fixture, rng: &mut ChaCha8Rng, i: usize) -> Option<(i64, Vec<Scalar>)> {
    let f = fx.alg.complex();
    let ring = f.ring();
    let ss: Vec<i64> = (-8..=8)
        .filter(|&s| ExtKR::layout(f, i, s).iter().any(|b| ring.dim(b.2) > 0))
        .collect();
    let s = *ss.choose(rng)?;
    let dim: usize = ExtKR::layout(f, i, s).iter().map(|b| ring.dim(b.2)).sum();
    Some((s, vector(rng, &ring.field(), dim)))
}

/// `(ψ·a)(g) = ψ(a·g)`: a cochain on `F_i` times `a` is a cochain on `F_{i−|a|}`.
pub fn cochain_times(alg: &TateAlgebra, i: usize, s: i64, psi: &[Scalar], a: &TateElement) -> (usize, i64, Vec<Scalar>) {
    let (i2, s2) = (i - a.hdeg, s - a.ideg);
    let f = alg.complex();
    let mut out = Vec::new();
    for &(j, _, _) in &ExtKR::layout(f, i2, s2) {
        let g = alg.monomial_element(&alg.monomials(i2)[j]);
        out.extend(apply_cochain(alg, i, s, psi, &alg.mul(a, &g)));
    }
    (i2, s2, out)
}

/// `π((ψ⊗x⊗y)·θ)` for the projection `π(ψ⊗x⊗y) = ψ·x`.
fn project_after_action(
    fx: &Fixture,
    th: &PiGenerator,
    i: usize,
    s: i64,
    psi: &[Scalar],
    x: &TateElement,
    ydeg: usize,
) -> Result<(usize, i64, Vec<Scalar>), String> {
    let alg = &fx.alg;
    let (p, st) = (th.chain.shift, th.chain.internal);
    let ((c1, pt), (c2, tx)) = right_action_terms(alg, &th.derivation, i, s, psi, x, ydeg).map_err(|e| e.to_string())?;
    let (i2, s2, first) = cochain_times(alg, i + p, s + st, &pt, x);
    let mut out = scale(&c1, &first);
    if !tx.is_zero() {
        let (i3, s3, second) = cochain_times(alg, i, s, psi, &tx);
        assert_eq!((i2, s2), (i3, s3));
        out = add(&out, &scale(&c2, &second));
    }
    Ok((i2, s2, out))
}

/// The relation `(φa)⊗x⊗y − φ⊗(ax)⊗y` projects to zero after acting by `θ`, and
/// `π(m·θ) = (−1)^{|θ||y|} π(m)θ`.
pub fn descent(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let alg = &fx.alg;
    let field = alg.field();
    let th = fx.gens.choose(rng).unwrap();
    let p = th.chain.shift;
    let i = rng.gen_range(0..=TOP - p);
    let Some((s, phi)) = random_cochain(fx, rng, i) else { return Ok(()) };
    let ha = rng.gen_range(0..=i);
    let hx = rng.gen_range(0..=i - ha);
    let (Some(a), Some(x)) = (monomial(alg, rng, ha), monomial(alg, rng, hx)) else { return Ok(()) };
    let ydeg = rng.gen_range(0..=TOP);
    let (ia, sa, phia) = cochain_times(alg, i, s, &phi, &a);
    let ax = alg.mul(&a, &x);
    let (i1, s1, t1) = project_after_action(fx, th, ia, sa, &phia, &x, ydeg)?;
    let mut rel = t1;
    if !ax.is_zero() {
        let (i2, s2, t2) = project_after_action(fx, th, i, s, &phi, &ax, ydeg)?;
        assert_eq!((i1, s1), (i2, s2));
        rel = sub(&rel, &t2);
    }
    if rel.iter().any(|c| !c.is_zero()) {
        return Err(format!("{}: relation does not descend under {}", fx.ring, th.name));
    }
    // equivariance of the projection
    let (ip, sp, lhs) = project_after_action(fx, th, i, s, &phi, &x, ydeg)?;
    let (ix, sx, px) = cochain_times(alg, i, s, &phi, &x);
    let rhs = compose_cochain(alg.complex(), ix, sx, &px, &th.chain).map_err(|e| e.to_string())?;
    assert_eq!((ip, sp), (ix + p, sx + th.chain.internal));
    if lhs != scale(&field.sign((p * ydeg) as i64), &rhs) {
        return Err(format!("{}: π is not {}-equivariant", fx.ring, th.name));
    }
    Ok(())
}

/// `ω((φ⊗x⊗y)·θ) = ω(φ⊗x⊗y)∘θ`, evaluated on a random monomial.
pub fn omega_right(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let alg = &fx.alg;
    let g = fx.tor.g_complex();
    let th = fx.gens.choose(rng).unwrap();
    let (p, st) = (th.chain.shift, th.chain.internal);
    let i = rng.gen_range(0..=TOP - p);
    let Some((s, phi)) = random_cochain(fx, rng, i) else { return Ok(()) };
    let hx = rng.gen_range(0..=i + p);
    let hf = i + p - hx;
    let (Some(x), Some(f)) = (monomial(alg, rng, hx), monomial(alg, rng, hf)) else { return Ok(()) };
    let n = rng.gen_range(0..=TOP);
    let j = rng.gen_range(0..g.rank(n));
    let (y, t) = (g.generator(n, j), g.gen_degree(n, j) as i64);
    let target = t + x.ideg + f.ideg - s - st;
    let err = |e: stabcoh::Error| e.to_string();
    let ((c1, pt), (c2, tx)) = right_action_terms(alg, &th.derivation, i, s, &phi, &x, n).map_err(err)?;
    let mut lhs = scale(&c1, &apply_omega(alg, g, i + p, s + st, &pt, &x, (n, t, &y), &f).map_err(err)?);
    if !tx.is_zero() {
        let second = apply_omega(alg, g, i, s, &phi, &tx, (n, t, &y), &f).map_err(err)?;
        lhs = add(&lhs, &scale(&c2, &second));
    }
    let tf = th.derivation.apply(alg, &f);
    let rhs = if tf.is_zero() {
        g.zero(n, target)
    } else {
        apply_omega(alg, g, i, s, &phi, &x, (n, t, &y), &tf).map_err(err)?
    };
    if lhs != rhs {
        return Err(format!("{}: ω not right {}-linear (i={i}, |x|={hx}, n={n})", fx.ring, th.name));
    }
    Ok(())
}

/// `ω(α·(φ⊗x⊗y)) = α∘ω(φ⊗x⊗y)` with `α·(φ⊗x⊗y) = (−1)^{|α|(|φ|+|x|)} φ⊗x⊗α(y)`.
pub fn omega_left(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let alg = &fx.alg;
    let g = fx.tor.g_complex();
    let field = alg.field();
    let q = rng.gen_range(0..=2);
    let Some(a) = random_ext_class(fx, rng, q) else { return Ok(()) };
    let n = rng.gen_range(q..=TOP);
    let lift = fx.ext.lift(&a, n - q).map_err(|e| e.to_string())?;
    let i = rng.gen_range(0..=TOP);
    let Some((s, phi)) = random_cochain(fx, rng, i) else { return Ok(()) };
    let hx = rng.gen_range(0..=i);
    let (Some(x), Some(f)) = (monomial(alg, rng, hx), monomial(alg, rng, i - hx)) else { return Ok(()) };
    let j = rng.gen_range(0..g.rank(n));
    let (y, t) = (g.generator(n, j), g.gen_degree(n, j) as i64);
    let err = |e: stabcoh::Error| e.to_string();
    let ay = lift.apply(g, g, n - q, t, &y);
    let sign = field.sign((q * (i + hx)) as i64);
    let lhs = scale(&sign, &apply_omega(alg, g, i, s, &phi, &x, (n - q, t - a.internal, &ay), &f).map_err(err)?);
    let w = apply_omega(alg, g, i, s, &phi, &x, (n, t, &y), &f).map_err(err)?;
    let rhs = lift.apply(g, g, n - q, t + x.ideg + f.ideg - s, &w);
    if lhs != rhs {
        return Err(format!("{}: ω not left linear (|α|={q}, i={i}, n={n})", fx.ring));
    }
    Ok(())
}

/// `χ(θ∘φ) = θ·χ(φ)` on `G⊗F`, for lifted functionals `φ`.
pub fn chi_linear(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let alg = &fx.alg;
    let g = fx.tor.g_complex();
    let field = alg.field();
    let th = fx.gens.choose(rng).unwrap();
    let p = th.chain.shift;
    let dims: Vec<((usize, i64), usize)> = fx.dual.tor.dims().into_iter().filter(|(k, d)| *d > 0 && k.0 + p <= TOP).collect();
    let &((n, t), d) = dims.choose(rng).unwrap();
    let phi = fx.dual.lift(n, t, &vector(rng, &field, d)).map_err(|e| e.to_string())?;
    let composed = phi.compose_derivation(&th.derivation, alg);
    let m = rng.gen_range(n + p..=TOP);
    let j = rng.gen_range(0..g.rank(m));
    let (y, a) = (g.generator(m, j), g.gen_degree(m, j) as i64);
    let hf = rng.gen_range(0..=TOP);
    let Some(f) = monomial(alg, rng, hf) else { return Ok(()) };
    let lhs = apply_chi(&composed, g, alg, (m, a, &y), &f);
    let rhs = combined_action_value(&th.derivation, &phi, g, alg, (m, a, &y), &f);
    if !(lhs.is_zero() && rhs.is_zero()) && lhs != rhs {
        return Err(format!("{}: χ not {}-linear at G_{m}", fx.ring, th.name));
    }
    Ok(())
}

/// The dual Koszul action by a degree-one generator agrees with the action through
/// `Hom(G, F)`, up to the sign `−(−1)^n` of the left action on degree `n`.
pub fn degree_one_dual(fx: &Fixture, rng: &mut ChaCha8Rng) -> Check {
    let field = fx.alg.field();
    let ones: Vec<(usize, &PiGenerator)> = fx.gens.iter().filter(|g| g.chain.shift == 1).enumerate().collect();
    let &(i, th) = ones.choose(rng).unwrap();
    let dims: Vec<((usize, i64), usize)> = fx.dual.tor.dims().into_iter().filter(|(k, d)| *d > 0 && k.0 < TOP).collect();
    let &((n, t), d) = dims.choose(rng).unwrap();
    let coords = vector(rng, &field, d);
    let formula = fx.dual.koszul_dual_action(n, t, &coords, i);
    let via = fx.dual.act_on_ext(&th.derivation, n, t, &coords).map_err(|e| e.to_string())?;
    let sign = -field.sign(n as i64);
    if formula != scale(&sign, &via) {
        return Err(format!("{}: Koszul dual action of y{} disagrees on Ext^{n}", fx.ring, i + 1));
    }
    Ok(())
}

pub type Suite = (&'static str, fn(&Fixture, &mut ChaCha8Rng) -> Check);

pub const SUITES: [Suite; 9] = [
    ("DG Lie: boundary", dg_boundary),
    ("DG Lie: bracket", dg_bracket),
    ("DG Lie: square", dg_square),
    ("divided powers", divided_powers),
    ("Yoneda associativity", yoneda_associative),
    ("descent to the tensor product over F", descent),
    ("ω right linearity", omega_right),
    ("ω left linearity", omega_left),
    ("χ linearity", chi_linear),
];

pub const DEGREE_ONE: Suite = ("degree-one dual action", degree_one_dual);

/// Runs a suite on `cases` seeds spread over all fixtures.
pub fn run_suite(suite: &Suite, cases: u64) -> Check {
    let fxs = fixtures();
    for seed in 0..cases {
        let fx = &fxs[(seed % fxs.len() as u64) as usize];
        (suite.1)(fx, &mut rng(seed))?;
    }
    Ok(())
}
