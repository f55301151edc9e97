//! Randomised checking of the tight-bound theorems.
//!
//! Each case evaluates a random term; normalising cases go through the
//! whole battery below, diverging (or exploding) ones are only counted.
//! Cases run in parallel but every case has its own seed and results are
//! merged in case order, so a run is reproducible bit for bit.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::derivation::{check, Conclusion, Derivation, Rule};
use crate::gen::{arbitrary, lazy_lo_derivation, random_derivation, simply_typed, Generator};
use crate::strategy::{applicable_rules, evaluate, evaluate_capped, step, StepKind, Trace};
use crate::synthesis::{
    check_unfolding, expand_along, mts_type_normal_form, subject_expand, subject_reduce, synthesize_from_trace,
    to_hd, to_lsc,
};
use crate::term::{System, Term};
use crate::types::Type;

/// Intermediate terms larger than this count as diverging.
pub const NODE_CAP: usize = 600;

#[derive(Clone, Debug, Serialize)]
pub struct FuzzConfig {
    pub system: System,
    pub count: usize,
    pub seed: u64,
    pub max_term_size: usize,
    pub fuel: usize,
    pub generator: Generator,
}

impl FuzzConfig {
    pub fn new(system: System) -> FuzzConfig {
        FuzzConfig { system, count: 100, seed: 0, max_term_size: 24, fuel: 300, generator: Generator::Arbitrary }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub term: String,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub attempted: usize,
    pub normalized: usize,
    pub skipped_fuel: usize,
    pub failures: Vec<Failure>,
    /// Passed assertions per check name.
    pub passes: BTreeMap<String, usize>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "attempted={} normalized={} skipped_fuel={} failures={}",
            self.attempted,
            self.normalized,
            self.skipped_fuel,
            self.failures.len()
        )
    }

    fn absorb(&mut self, case: usize, term: &Term, r: CaseReport) {
        self.attempted += 1;
        if r.normalized {
            self.normalized += 1;
        } else {
            self.skipped_fuel += 1;
        }
        for name in r.passes {
            *self.passes.entry(name.to_string()).or_default() += 1;
        }
        for (check, detail) in r.failures {
            self.failures.push(Failure { case, term: term.to_string(), check: check.to_string(), detail });
        }
    }
}

/// Outcome of the battery on one term.
#[derive(Clone, Debug, Default)]
pub struct CaseReport {
    pub normalized: bool,
    pub passes: Vec<&'static str>,
    pub failures: Vec<(&'static str, String)>,
}

impl CaseReport {
    fn ensure(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) -> bool {
        if ok {
            self.passes.push(name);
        } else {
            self.failures.push((name, detail()));
        }
        ok
    }

    fn ok<T>(&mut self, name: &'static str, r: Result<T, impl std::fmt::Display>) -> Option<T> {
        match r {
            Ok(v) => {
                self.passes.push(name);
                Some(v)
            }
            Err(e) => {
                self.failures.push((name, e.to_string()));
                None
            }
        }
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn generate_term(cfg: &FuzzConfig, rng: &mut ChaCha8Rng) -> Term {
    match cfg.generator {
        Generator::Arbitrary => arbitrary(rng, cfg.max_term_size),
        Generator::SimplyTyped => simply_typed(rng, cfg.max_term_size),
    }
}

pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let cases: Vec<(Term, CaseReport)> = (0..cfg.count.max(1))
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(cfg.seed, i);
            let t = generate_term(cfg, &mut rng);
            let r = check_case(cfg.system, &t, cfg.fuel, &mut rng);
            (t, r)
        })
        .collect();
    let mut report = FuzzReport::default();
    for (i, (t, r)) in cases.into_iter().enumerate() {
        report.absorb(i, &t, r);
    }
    report
}

/// The battery on fixed terms.
pub fn run_terms(sys: System, terms: &[Term], fuel: usize, seed: u64) -> FuzzReport {
    let mut report = FuzzReport::default();
    for (i, t) in terms.iter().enumerate() {
        let r = check_case(sys, t, fuel, &mut case_rng(seed, i));
        report.absorb(i, t, r);
    }
    report
}

fn terms_of(tr: &Trace) -> impl Iterator<Item = &Term> {
    std::iter::once(&tr.initial).chain(tr.steps.iter().map(|s| &s.result))
}

/// `b + r` (plus `e`, plus the number of ES nodes, in the linear head
/// system) against the derivation size.
fn size_identity(d: &Derivation) -> bool {
    let i = d.indices();
    i.b + i.e + i.r + d.count_rule(Rule::ES) == d.size()
}

pub fn check_case(sys: System, t: &Term, fuel: usize, rng: &mut ChaCha8Rng) -> CaseReport {
    let mut rep = CaseReport::default();
    let trace = match evaluate_capped(sys, t, fuel, Some(NODE_CAP)) {
        Ok((tr, false)) if tr.reached_normal => tr,
        Ok(_) => return rep,
        Err(e) => {
            rep.failures.push(("evaluate", e.to_string()));
            return rep;
        }
    };
    rep.normalized = true;
    term_properties(sys, &trace, &mut rep);
    let Some(d) = rep.ok("synthesize", synthesize_from_trace(&trace)) else { return rep };
    tight_properties(sys, &trace, &d, &mut rep);
    reduce_chain(sys, &trace, &d, &mut rep);
    match sys {
        System::Hd => head_iso_properties(t, &d, fuel, &mut rep),
        System::Lsc => lsc_properties(t, &trace, &d, fuel, &mut rep),
        System::Lo => {
            shrinking_properties(&trace, &mut rep);
            generic_lo_properties(&trace, &mut rep);
        }
        System::Mx => {
            for other in [System::Hd, System::Lo] {
                let k = evaluate(other, t, fuel).map(|tr| (tr.reached_normal, tr.totals.k));
                rep.ensure("perpetual", matches!(k, Ok((true, k)) if k <= trace.totals.k), || {
                    format!("{other} needs {k:?} steps, mx needs {}", trace.totals.k)
                });
            }
        }
    }
    spreading(sys, &trace, rng, &mut rep);
    rep
}

fn term_properties(sys: System, tr: &Trace, rep: &mut CaseReport) {
    let n = tr.steps.len();
    for (i, u) in terms_of(tr).enumerate() {
        let Ok(c) = u.classify(sys) else { continue };
        rep.ensure("neutral_iff", c.neutral == (c.normal && !c.abs), || format!("{u}: {c:?}"));
        let rules = applicable_rules(sys, u);
        rep.ensure("determinism", rules <= 1, || format!("{rules} rules apply to {u}"));
        let stuck = i == n;
        rep.ensure("step_iff_normal", c.normal == stuck && (rules == 0) == stuck, || {
            format!("{u}: normal={} rules={rules}", c.normal)
        });
    }
    if let Ok(None) = step(sys, &tr.final_term) {
        rep.passes.push("step_iff_normal");
    } else {
        rep.failures.push(("step_iff_normal", format!("{} still steps", tr.final_term)));
    }
}

fn tight_properties(sys: System, tr: &Trace, d: &Derivation, rep: &mut CaseReport) {
    rep.ok("derivation_checks", check(d));
    let f = d.flags();
    let tight = if sys == System::Mx { f.mx_tight } else { f.tight };
    rep.ensure("tight", tight && f.shrinking, || format!("{f:?}"));
    let i = d.indices();
    let size = tr.final_term.size(sys).unwrap_or(usize::MAX);
    let tot = tr.totals;
    let ok = match sys {
        System::Hd | System::Lo => i.b == 2 * tot.k && i.r == size,
        System::Mx => i.b == 2 * tot.k && i.r == size + tot.e_total,
        System::Lsc => i.b == 2 * tot.k_m && i.e == tot.k_e && i.r == size,
    };
    rep.ensure("indices", ok, || format!("{} vs k={} size={size} totals={tot:?}", i.show(sys), tot.k));
    let c = tr.final_term.classify(sys).expect("classify");
    let want = if c.neutral { Type::Neutral } else { Type::Abs };
    rep.ensure("root_type", d.conclusion() == &Conclusion::Type(want), || d.conclusion().to_string());
    rep.ensure("size_identity", size_identity(d), || format!("{} vs size {}", i.show(sys), d.size()));
}

fn reduce_chain(sys: System, tr: &Trace, d: &Derivation, rep: &mut CaseReport) {
    let mut cur = d.clone();
    for st in &tr.steps {
        let Some(next) = rep.ok("reduce_chain", subject_reduce(&cur, st)) else { return };
        if check(&next).is_err() || next.judgement.subject != st.result {
            rep.failures.push(("reduce_chain", format!("reduct of `{}` does not check", st.source)));
            return;
        }
        let (a, b) = (cur.indices(), next.indices());
        let ok = match st.kind {
            StepKind::LscExponential => b.b == a.b && b.e + 1 == a.e && b.r == a.r,
            StepKind::MxErasing { erased_size } => b.b + 2 == a.b && b.r + erased_size == a.r,
            _ => b.b + 2 == a.b && b.e == a.e && b.r == a.r,
        };
        rep.ensure("reduce_deltas", ok, || {
            format!("{} step: {} -> {}", st.kind.label(), a.show(sys), b.show(sys))
        });
        rep.ensure("size_identity", size_identity(&next), || next.indices().show(sys));
        match subject_expand(&next, st) {
            Ok(back) if back.judgement == cur.judgement => rep.passes.push("expand_inverse"),
            Ok(back) => rep.failures.push(("expand_inverse", format!("{} vs {}", back.judgement, cur.judgement))),
            Err(e) => rep.failures.push(("expand_inverse", e.to_string())),
        }
        cur = next;
    }
}

fn head_iso_properties(t: &Term, d: &Derivation, fuel: usize, rep: &mut CaseReport) {
    let Some(l) = rep.ok("head_iso", to_lsc(d)) else { return };
    rep.ok("head_iso", check(&l));
    rep.ensure("head_iso", to_hd(&l).ok().as_ref() == Some(d), || "N(L(Φ)) differs from Φ".into());
    let (a, b) = (d.indices(), l.indices());
    rep.ensure("head_iso_indices", a.b == b.b && a.r + 1 == b.r, || {
        format!("{} vs {}", a.show(System::Hd), b.show(System::Lsc))
    });
    if let Ok((tr, false)) = evaluate_capped(System::Lsc, t, fuel * 20, Some(NODE_CAP * 4)) {
        if tr.reached_normal {
            rep.ensure("head_iso_counts", b.b == 2 * tr.totals.k_m && b.e == tr.totals.k_e, || {
                format!("L gives {} but lsc takes k_m={} k_e={}", b.show(System::Lsc), tr.totals.k_m, tr.totals.k_e)
            });
        }
    }
}

fn lsc_properties(t: &Term, tr: &Trace, d: &Derivation, fuel: usize, rep: &mut CaseReport) {
    if let Some(h) = rep.ok("unfolding", check_unfolding(d)) {
        let (a, b) = (d.indices(), h.indices());
        rep.ensure("unfolding", check(&h).is_ok() && h.subject() == t && b.b == a.b && b.r + 1 == a.r, || {
            format!("{} vs {}", a.show(System::Lsc), b.show(System::Hd))
        });
        rep.ensure("unfolding", h.judgement.context == d.judgement.context, || "context changed".into());
    }
    if let Some(n) = rep.ok("head_iso", to_hd(d)) {
        rep.ensure("head_iso", to_lsc(&n).ok().as_ref() == Some(d), || "L(N(Ψ)) differs from Ψ".into());
    }
    let unfolded = std::sync::Arc::new(tr.final_term.clone()).unfold();
    match evaluate(System::Hd, t, fuel) {
        Ok(h) if h.reached_normal => {
            rep.ensure("lsc_hd_agreement", *unfolded == h.final_term, || {
                format!("unfold gives {unfolded}, head gives {}", h.final_term)
            });
        }
        _ => rep.failures.push(("lsc_hd_agreement", "head evaluation does not normalise".into())),
    }
}

fn shrinking_properties(tr: &Trace, rep: &mut CaseReport) {
    let Some(m) = rep.ok("mts", mts_type_normal_form(&tr.final_term, None)) else { return };
    let size = tr.final_term.size(System::Lo).expect("pure");
    rep.ensure("mts", m.indices().b == size && m.indices().r == 0 && m.size() == size && m.type_size() == size, || {
        format!("{} size {} type size {}", m.indices().show(System::Lo), m.size(), m.type_size())
    });
    let Some(phi) = rep.ok("shrinking", expand_along(m, &tr.steps)) else { return };
    let f = phi.flags();
    rep.ensure("shrinking", check(&phi).is_ok() && f.traditional && f.shrinking, || format!("{f:?}"));
    let k = tr.totals.k;
    rep.ensure("shrinking_correctness", size + 2 * k <= phi.size(), || format!("|p|={size} k={k} |Φ|={}", phi.size()));
    rep.ensure("shrinking_completeness", 2 * k <= phi.indices().b && size == phi.type_size(), || {
        format!("k={k} b={} |p|={size} type size {}", phi.indices().b, phi.type_size())
    });
    let mut cur = phi;
    for st in &tr.steps {
        let Some(next) = rep.ok("shrinking_reduction", subject_reduce(&cur, st)) else { return };
        rep.ensure("shrinking_reduction", next.indices().b + 2 <= cur.indices().b && next.flags().shrinking, || {
            format!("b {} -> {}", cur.indices().b, next.indices().b)
        });
        cur = next;
    }
}

/// A derivation that leaves every argument of the head-normal form untyped,
/// expanded back to the start: later steps may happen outside it.
fn generic_lo_properties(tr: &Trace, rep: &mut CaseReport) {
    let Some(k) = terms_of(tr).position(|u| u.classify(System::Hd).is_ok_and(|c| c.normal)) else { return };
    let mid = terms_of(tr).nth(k).expect("position");
    let Some(lazy) = lazy_lo_derivation(mid) else { return };
    let Some(phi) = rep.ok("generic_reduction", expand_along(lazy, &tr.steps[..k])) else { return };
    let mut cur = phi;
    for st in &tr.steps {
        let Some(next) = rep.ok("generic_reduction", subject_reduce(&cur, st)) else { return };
        rep.ensure("generic_reduction", check(&next).is_ok() && next.indices().b <= cur.indices().b, || {
            format!("b {} -> {}", cur.indices().b, next.indices().b)
        });
        cur = next;
    }
}

/// Random (mostly non-tight) derivations of the normal form: size bound,
/// tight spreading, and the tight-normal-form identities.
fn spreading(sys: System, tr: &Trace, rng: &mut ChaCha8Rng, rep: &mut CaseReport) {
    let p = std::sync::Arc::new(tr.final_term.clone()).unfold();
    let (sys, p) = if sys == System::Lsc { (System::Hd, p) } else { (sys, p) };
    let c = p.classify(sys).expect("pure");
    if !c.normal {
        return;
    }
    let size = p.size(sys).expect("pure");
    for _ in 0..3 {
        let Some(d) = rep.ok("spreading", random_derivation(rng, sys, &p)) else { return };
        rep.ok("spreading", check(&d));
        let f = d.flags();
        // LO arguments typed by `[]` are not counted by the derivation
        if sys != System::Lo || f.shrinking {
            rep.ensure("normal_size_bound", size <= d.size(), || format!("|p|={size} |Φ|={}", d.size()));
        }
        let tight = if sys == System::Mx { f.mx_tight } else { f.tight };
        if tight {
            rep.ensure("tight_normal", d.indices().b == 0 && d.indices().r == size, || d.indices().show(sys));
        }
        if c.neutral && d.context().is_tight() {
            rep.ensure("spreading", d.conclusion().is_tight(), || d.judgement.to_string());
        }
        if d.conclusion() == &Conclusion::Type(Type::Neutral) {
            rep.ensure("neutrality", c.neutral, || p.to_string());
        }
    }
}
