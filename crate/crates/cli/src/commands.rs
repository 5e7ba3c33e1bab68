use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};
use stabcoh::bimodule::bounded_ext;
use stabcoh::parse::{parse_field, parse_presentation_text};
use stabcoh::resolution::{ext_k_r, ext_m_k, minimal_resolution, ExtAlgebra, ModuleSpec};
use stabcoh::ring::{RingClass, RingPresentation};
use stabcoh::stable::{
    build_model_et, compare_model_with_tor, ext_window, stable_dims, stable_model, trivial_extension,
    AlgebraWindow, CommutativityVerdict, StableModel,
};
use stabcoh::tate::acyclic_closure;
use stabcoh::tor::{pi_generators, symmetry_report, TorModule};
use stabcoh::{Error, Result};

use crate::report::{ActionEntry, ReportDocument, Table, Verdict};
use crate::{Command, Request};

fn load_ring(req: &Request) -> Result<Arc<RingPresentation>> {
    let parsed = parse_presentation_text(&req.ring)?;
    let field = match &req.field {
        Some(f) => parse_field(f.trim(), 0)?,
        None => parsed.field,
    };
    Ok(Arc::new(RingPresentation::new(
        field,
        parsed.variables,
        parsed.relations,
        req.degree_bound.max(2),
    )?))
}

/// `"3:1 4:2"`: counts per internal degree.
fn by_degree<K: std::fmt::Display>(m: &BTreeMap<K, usize>) -> String {
    m.iter()
        .filter(|(_, &c)| c > 0)
        .map(|(k, c)| format!("{k}:{c}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn split_by_degree<I: IntoIterator<Item = ((i64, i64), usize)>>(dims: I) -> BTreeMap<i64, BTreeMap<i64, usize>> {
    let mut out: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
    for ((n, s), d) in dims {
        *out.entry(n).or_default().entry(s).or_insert(0) += d;
    }
    out
}

fn verdict(check: &str, verdict: &str, witness: Option<Value>, detail: Option<String>) -> Verdict {
    Verdict {
        check: check.into(),
        verdict: verdict.into(),
        witness,
        detail,
    }
}

fn commutativity_verdict(check: &str, alg: &AlgebraWindow) -> Verdict {
    match alg.commutativity_check() {
        CommutativityVerdict::Commutative { checked_pairs } => verdict(
            check,
            "graded-commutative",
            None,
            Some(format!("{checked_pairs} basis pairs checked")),
        ),
        w => verdict(check, "not graded-commutative", serde_json::to_value(&w).ok(), None),
    }
}

fn window_table(name: &str, alg: &AlgebraWindow, lo: i64, hi: i64) -> Table {
    let mut t = Table::new(name, &["n", "dim", "by internal degree"]);
    let split = split_by_degree(alg.dims.iter().map(|(&b, &d)| (b, d)));
    for n in lo..=hi {
        let row = split.get(&n).cloned().unwrap_or_default();
        t.push(vec![n.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row)], false);
    }
    t
}

pub fn run(req: &Request, doc: &mut ReportDocument) -> Result<()> {
    let ring = load_ring(req)?;
    let class = ring.classify();
    match &class {
        Ok(c) => doc.classification = serde_json::to_value(c).ok(),
        Err(e) => doc.notes.push(format!("classification unavailable: {e}")),
    }
    let class = class.as_ref().ok();
    match req.command {
        Command::Betti => betti(req, &ring, doc),
        Command::Ext => ext(req, &ring, doc),
        Command::Tor => tor(req, &ring, doc),
        Command::Actions => actions(req, &ring, doc),
        Command::Bounded => bounded(req, &ring, class, doc),
        Command::Stable => stable(req, &ring, doc),
        Command::CheckSymmetry => check_symmetry(req, &ring, doc),
        Command::CheckCommutativity => check_commutativity(req, &ring, class, doc),
        Command::Model => model(req, &ring, class, doc),
    }
}

fn betti(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let module = ModuleSpec::parse(&req.module, ring)?;
    let res = minimal_resolution(ring, &module, req.max);
    let bound = ring.bound();
    let first_hit = (0..=req.max).find(|&n| res.complex.degrees(n).contains(&bound));
    let mut t = Table::new("betti", &["n", "b_n", "by internal degree"]);
    for (n, b) in res.betti().iter().enumerate() {
        let mut split = BTreeMap::new();
        for &a in res.complex.degrees(n) {
            *split.entry(a).or_insert(0) += 1;
        }
        t.push(vec![n.to_string(), b.to_string(), by_degree(&split)], first_hit.is_some_and(|h| n >= h));
    }
    doc.tables.push(t);
    if let Some(h) = first_hit {
        doc.incomplete.push(format!("betti numbers from n = {h} on (generators at the degree bound {bound})"));
    }
    doc.notes.extend(res.notes);
    Ok(())
}

fn ext(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let module = ModuleSpec::parse(&req.module, ring)?;
    if !module.is_residue_field() {
        let res = ext_m_k(ring, &module, req.max);
        let mut t = Table::new("Ext_R(M,k)", &["n", "dim", "by internal degree"]);
        for (n, b) in res.betti().iter().enumerate() {
            let mut split = BTreeMap::new();
            for &a in res.complex.degrees(n) {
                *split.entry(a).or_insert(0) += 1;
            }
            t.push(vec![n.to_string(), b.to_string(), by_degree(&split)], res.truncated);
        }
        if res.truncated {
            doc.incomplete.push("Ext_R(M,k): the resolution reached the degree bound".into());
        }
        doc.tables.push(t);
        return Ok(());
    }
    let alg = acyclic_closure(ring, req.max)?;
    let ext = ExtAlgebra::from_resolution(alg.resolution());
    let mut t = Table::new("Ext_R(k,k)", &["n", "dim", "by internal degree"]);
    let split = split_by_degree(ext.dims().into_iter().map(|((n, s), d)| ((n as i64, s), d)));
    for n in 0..=req.max as i64 {
        let row = split.get(&n).cloned().unwrap_or_default();
        t.push(
            vec![n.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row)],
            alg.truncated,
        );
    }
    doc.tables.push(t);
    let ekr = ext_k_r(alg.complex());
    let mut t = Table::new("Ext_R(k,R)", &["n", "dim", "by internal degree"]);
    let split = split_by_degree(ekr.dims.iter().map(|(&(n, s), &d)| ((n as i64, s), d)));
    for n in 0..=req.max {
        let row = split.get(&(n as i64)).cloned().unwrap_or_default();
        let inc = ekr.incomplete.iter().any(|&(m, _)| m == n);
        t.push(vec![n.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row)], inc);
    }
    doc.tables.push(t);
    if alg.truncated {
        doc.incomplete.push("acyclic closure truncated by the degree bound".into());
    }
    for (n, s) in &ekr.incomplete {
        doc.incomplete.push(format!("Ext^{n}(k,R) in internal degree {s} lies beyond the degree bound"));
    }
    doc.notes.extend(alg.notes.iter().cloned());
    Ok(())
}

fn tor_module(req: &Request, ring: &Arc<RingPresentation>, top: usize) -> Result<TorModule> {
    let module = ModuleSpec::parse(&req.module, ring)?;
    let alg = Arc::new(acyclic_closure(ring, top)?);
    TorModule::new(alg, &module, top)
}

fn tor(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let tor = tor_module(req, ring, req.max)?;
    let mut t = Table::new("Tor^R(k,N)", &["n", "dim", "by internal degree", "basis"]);
    let split = split_by_degree(tor.dims().into_iter().map(|((n, s), d)| ((n as i64, s), d)));
    for n in 0..=req.max {
        let row = split.get(&(n as i64)).cloned().unwrap_or_default();
        let basis: Vec<String> = row.keys().flat_map(|&s| tor.basis_labels(n, s)).collect();
        t.push(
            vec![n.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row), basis.join(", ")],
            tor.truncated,
        );
    }
    doc.tables.push(t);
    if tor.truncated {
        doc.incomplete.push("Tor truncated by the degree bound".into());
    }
    doc.notes.extend(tor.notes.iter().cloned());
    Ok(())
}

fn actions(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let tor = tor_module(req, ring, req.max)?;
    let both_sides = tor.is_residue();
    if !both_sides {
        doc.notes.push("N ≠ k: only the right action by derivations is defined".into());
    }
    for deg in 1..=2.min(req.max) {
        for g in pi_generators(tor.tate(), deg)? {
            for n in deg..=req.max {
                for z in tor.basis_classes(n) {
                    if both_sides {
                        let l = tor.left_action_chain(&g.chain, &z)?;
                        doc.actions.push(ActionEntry {
                            side: "left".into(),
                            actor: g.name.clone(),
                            element: tor.class_string(&z),
                            value: tor.class_string(&l),
                        });
                    }
                    let r = tor.right_action_chain(&z, &g.chain)?;
                    doc.actions.push(ActionEntry {
                        side: "right".into(),
                        actor: g.name.clone(),
                        element: tor.class_string(&z),
                        value: tor.class_string(&r),
                    });
                }
            }
        }
    }
    if tor.truncated {
        doc.incomplete.push("Tor truncated by the degree bound".into());
    }
    Ok(())
}

fn bounded(req: &Request, ring: &Arc<RingPresentation>, class: Option<&RingClass>, doc: &mut ReportDocument) -> Result<()> {
    if !ModuleSpec::parse(&req.module, ring)?.is_residue_field() {
        return Err(Error::Precondition("bounded cohomology is computed for N = k".into()));
    }
    let d = class.and_then(|c| c.krull_dimension).unwrap_or(0) as i64;
    let w = req.window as i64;
    let top = req.window + d as usize + 1;
    let alg = Arc::new(acyclic_closure(ring, top)?);
    let tor = TorModule::residue(alg, top)?;
    let b = bounded_ext(&tor, &[], -w, d + 1)?;
    let mut t = Table::new("bounded Ext", &["m", "dim", "by internal degree"]);
    let split = split_by_degree(b.dims.iter().map(|(&k, &v)| (k, v)));
    for m in -w..=d + 1 {
        let row = split.get(&m).cloned().unwrap_or_default();
        let inc = b.incomplete.contains(&m);
        t.push(vec![m.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row)], inc);
        if inc {
            doc.incomplete.push(format!("bounded Ext in degree {m}"));
        }
    }
    doc.tables.push(t);
    if class.is_some_and(|c| c.is_gorenstein) {
        // ℬ^m against (Σ^{−d}Tor)^m = Tor_{d−m}
        let tt = tor.total_by_degree();
        let mut diffs = Vec::new();
        for m in -w..=d + 1 {
            if b.incomplete.contains(&m) {
                continue;
            }
            let want = if d - m >= 0 { tt.get((d - m) as usize).copied() } else { Some(0) };
            if let Some(want) = want {
                let got = b.total_by_degree().get(&m).copied().unwrap_or(0);
                if got != want {
                    diffs.push(json!({"degree": m, "bounded": got, "tor": want}));
                }
            }
        }
        let v = if diffs.is_empty() { "equal" } else { "differs" };
        doc.verdicts.push(verdict(
            "Gorenstein shift: bounded Ext = Σ^{-d} Tor",
            v,
            (!diffs.is_empty()).then_some(Value::Array(diffs)),
            Some(format!("d = {d}")),
        ));
    }
    doc.notes.extend(b.notes.iter().cloned());
    Ok(())
}

fn stable(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let rows = stable_dims(ring, req.window)?;
    let mut t = Table::new("stable cohomology", &["n", "Ext", "Σ bounded", "total"]);
    for r in &rows {
        t.push(
            vec![r.degree.to_string(), r.ext.to_string(), r.suspended_bounded.to_string(), r.total.to_string()],
            r.incomplete,
        );
        if r.incomplete {
            doc.incomplete.push(format!("stable cohomology in degree {}", r.degree));
        }
    }
    doc.tables.push(t);
    let w = req.window as i64;
    let mut products_valid = true;
    let (name, alg, detail) = match stable_model(ring, req.window, req.assume_depth2)? {
        StableModel::Laurent(l) => {
            products_valid = l.products_valid;
            ("Laurent model Λ(ξ)⊗k[t,t⁻¹]", l.algebra, None)
        }
        StableModel::TrivialExtension {
            extension,
            krull_dimension,
            word_order,
            ..
        } => (
            "trivial extension E ⋉ Σ^{1-d} E^∨",
            extension.algebra,
            Some(format!(
                "d = {krull_dimension}; {} bimodule identities verified; word order {word_order:?}",
                extension.verified
            )),
        ),
    };
    doc.tables.push(window_table(name, &alg, -w, w));
    let totals = alg.total_by_degree();
    let mismatches: Vec<Value> = rows
        .iter()
        .filter(|r| !r.incomplete && r.degree >= alg.range.0 && r.degree <= alg.range.1)
        .filter(|r| totals.get(&r.degree).copied().unwrap_or(0) != r.total)
        .map(|r| json!({"degree": r.degree, "sequence": r.total, "model": totals.get(&r.degree).copied().unwrap_or(0)}))
        .collect();
    doc.verdicts.push(verdict(
        "model dims = exact-sequence dims",
        if mismatches.is_empty() { "equal" } else { "differs" },
        (!mismatches.is_empty()).then_some(Value::Array(mismatches)),
        detail,
    ));
    if products_valid {
        doc.verdicts.push(commutativity_verdict("graded commutativity of the model", &alg));
    } else {
        // 𝒮 contains Ext_R(k,k) as a subalgebra, so a witness there is a witness in 𝒮
        let closure = acyclic_closure(ring, req.window.min(4))?;
        let (e, _) = ext_window(&closure, req.window.min(4))?;
        doc.verdicts.push(commutativity_verdict("graded commutativity of stable cohomology (via Ext_R(k,k))", &e));
        doc.notes.push(
            "the relation is not in 𝔪³: the Laurent model gives dimensions only; stable cohomology is the central localization of Ext_R(k,k)".into(),
        );
    }
    Ok(())
}

fn check_symmetry(req: &Request, ring: &Arc<RingPresentation>, doc: &mut ReportDocument) -> Result<()> {
    let alg = Arc::new(acyclic_closure(ring, req.max)?);
    let rep = symmetry_report(&alg, req.max)?;
    doc.verdicts.push(verdict(
        "symmetry of Tor^R(k,k)",
        if rep.symmetric { "symmetric" } else { "not symmetric" },
        (!rep.witnesses.is_empty()).then(|| serde_json::to_value(&rep.witnesses).expect("serializable")),
        Some(format!("{} pairs checked through degree {}", rep.checked_pairs, rep.max_degree)),
    ));
    doc.notes.extend(rep.notes);
    Ok(())
}

fn check_commutativity(
    req: &Request,
    ring: &Arc<RingPresentation>,
    class: Option<&RingClass>,
    doc: &mut ReportDocument,
) -> Result<()> {
    let alg = acyclic_closure(ring, req.max)?;
    let (w, _) = ext_window(&alg, req.max)?;
    doc.tables.push(window_table("Ext_R(k,k)", &w, 0, req.max as i64));
    doc.verdicts.push(commutativity_verdict("graded commutativity of Ext_R(k,k)", &w));
    if let Some(c) = class {
        doc.notes.push(format!(
            "relations {} in 𝔪³",
            if c.in_cube { "lie" } else { "do not lie" }
        ));
    }
    if alg.truncated {
        doc.incomplete.push("acyclic closure truncated by the degree bound".into());
    }
    Ok(())
}

fn model(req: &Request, ring: &Arc<RingPresentation>, class: Option<&RingClass>, doc: &mut ReportDocument) -> Result<()> {
    let class = class.ok_or_else(|| Error::Precondition("the ring could not be classified".into()))?;
    let alg = Arc::new(acyclic_closure(ring, req.max)?);
    if !alg.is_explicit_ci() {
        return Err(Error::Precondition("the E ⋉ T model exists for complete intersections only".into()));
    }
    let degs: Vec<i64> = ring.relations().iter().map(|r| r.degree as i64).collect();
    let m = build_model_et(ring.embedding_dimension(), &degs, req.max, ring.field());
    doc.tables.push(window_table("E = Λ(ξ)⊗Sym(χ)", &m.algebra, 0, req.max as i64));
    let mut t = Table::new("T = Λ(x)⊗Γ(y)", &["m", "dim", "by internal degree"]);
    let split = split_by_degree(m.module.dims.iter().map(|(&k, &v)| (k, v)));
    for n in -(req.max as i64)..=0 {
        let row = split.get(&n).cloned().unwrap_or_default();
        t.push(vec![n.to_string(), row.values().sum::<usize>().to_string(), by_degree(&row)], false);
    }
    doc.tables.push(t);
    let tor = TorModule::residue(alg, req.max)?;
    let cmp = compare_model_with_tor(&m, &tor)?;
    doc.verdicts.push(verdict(
        "T against Tor^R(k,k) (dims and generator actions)",
        if cmp.agrees() { "equal" } else { "differs" },
        (!cmp.mismatches.is_empty()).then(|| json!(cmp.mismatches)),
        Some(format!("{} action entries compared", cmp.entries_compared)),
    ));
    let d = class.krull_dimension.unwrap_or(0) as i64;
    let te = trivial_extension(&m.algebra, &m.module.suspend(1 - d))?;
    doc.tables.push(window_table("E ⋉ Σ^{1-d} T", &te.algebra, -(req.max as i64), req.max as i64));
    doc.verdicts.push(commutativity_verdict("graded commutativity of E ⋉ Σ^{1-d} T", &te.algebra));
    if m.c == 1 {
        doc.notes.push("hypersurface: stable cohomology is the Laurent model, not E ⋉ T".into());
    }
    Ok(())
}
