//! Constructive side of the tight-bound theorems: typing normal forms,
//! substitution and anti-substitution on derivations, subject reduction
//! and expansion along recorded steps, and the head isomorphism.

use std::sync::Arc;

use crate::derivation::{complete, fresh_for, Derivation, Rule};
use crate::error::Error;
use crate::strategy::{evaluate, StepKind, StepRecord, Trace};
use crate::surgery::{at_path, cut_sk, fold_sk, rebuild, subst_sk, tnf_sk, Sk};
use crate::term::{lo_neutral, lo_normal, System, Term};
use crate::types::{MultiSet, Type};

/// Derivations of one subject, to be plugged in for a variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivPool {
    pub subject: Term,
    pub members: Vec<Derivation>,
}

impl DerivPool {
    pub fn types(&self) -> MultiSet {
        self.members.iter().filter_map(|d| d.conclusion().as_type().cloned()).collect()
    }
}

fn same_subject(found: &Term, expected: &Term) -> Result<(), Error> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::SubjectMismatch(format!("derivation types `{found}`, expected `{expected}`")))
    }
}

fn not_typed(msg: &str) -> Error {
    Error::NotTypedAtRedex(msg.to_string())
}

/// Binder body of `x` in `t`, as a de Bruijn term.
fn abstract_name(x: &str, t: &Term) -> Arc<Term> {
    match Term::lam(x, t.clone()) {
        Term::Lam(_, b) => b,
        _ => unreachable!(),
    }
}

/// Tight derivation of a normal form with indices `(0, |t|)` (`(0, 0, |t|)`
/// in the linear head system).
pub fn type_normal_form(sys: System, t: &Term) -> Result<Derivation, Error> {
    if !t.classify(sys)?.normal {
        return Err(Error::NotNormal(t.to_string()));
    }
    rebuild(sys, &tnf_sk(sys, t), &Arc::new(t.clone()))
}

/// Replaces every axiom on `x` in `phi_t` by a pool member of the same
/// type. The pool's types must be exactly the multiset `phi_t` gives `x`.
pub fn substitute_derivation(sys: System, phi_t: &Derivation, x: &str, pool: &DerivPool) -> Result<Derivation, Error> {
    let m = phi_t.context().get(x);
    if pool.types() != m || pool.members.len() != m.len() {
        return Err(Error::PoolMismatch(format!("pool types {} but `{x}` needs {m}", pool.types())));
    }
    if sys == System::Mx && m.is_empty() {
        return Err(Error::PoolMismatch("the maximal system needs a non-empty pool".into()));
    }
    for p in &pool.members {
        same_subject(p.subject(), &pool.subject)?;
    }
    let body = abstract_name(x, phi_t.subject());
    let mut sks: Vec<Sk> = pool.members.iter().map(Sk::of).collect();
    let sk = subst_sk(&Sk::of(phi_t), &body, 0, &mut sks)?;
    if !sks.is_empty() {
        return Err(Error::PoolMismatch(format!("{} pool member(s) left over", sks.len())));
    }
    rebuild(sys, &sk, &body.instantiate(&Arc::new(pool.subject.clone())))
}

/// Splits a derivation of `u{x := q}` into one of `u` (with `x` in its
/// context) and a pool of derivations of `q`, one per typed occurrence.
pub fn anti_substitute(
    sys: System,
    phi: &Derivation,
    u: &Term,
    x: &str,
    q: &Term,
) -> Result<(Derivation, DerivPool), Error> {
    same_subject(phi.subject(), &u.substitute(x, q))?;
    let body = abstract_name(x, u);
    let mut cut = Vec::new();
    let sk = cut_sk(&Sk::of(phi), &body, 0, &mut cut)?;
    let phi_u = rebuild(sys, &sk, &Arc::new(u.clone()))?;
    let qa = Arc::new(q.clone());
    let mut members = cut.iter().map(|s| rebuild(sys, s, &qa)).collect::<Result<Vec<_>, _>>()?;
    members.sort_by(|a, b| a.conclusion().as_type().cmp(&b.conclusion().as_type()));
    Ok((phi_u, DerivPool { subject: q.clone(), members }))
}

/// Transports `phi` along one step of its own system.
pub fn subject_reduce(phi: &Derivation, st: &StepRecord) -> Result<Derivation, Error> {
    let sys = phi.system();
    same_subject(phi.subject(), &st.source)?;
    let (sk, _) = at_path(&Sk::of(phi), &st.source, &st.redex_path, &mut |node, t| contract(st, node, t))?;
    rebuild(sys, &sk, &Arc::new(st.result.clone()))
}

fn contract(st: &StepRecord, node: &Sk, t: &Term) -> Result<Sk, Error> {
    match st.kind {
        StepKind::LscExponential => {
            let (Term::ESub(body, _, _), Rule::ES) = (t, node.rule) else {
                return Err(not_typed("exponential redex not typed by es"));
            };
            let occ = st.occurrence.as_deref().ok_or_else(|| not_typed("missing occurrence"))?;
            let mut pool = node.kids[1].kids.clone();
            let (b, n) = at_path(&node.kids[0], body, &occ[1..], &mut |ax, _| {
                if ax.rule != Rule::Ax {
                    return Err(not_typed("occurrence not typed by ax"));
                }
                let i = pool
                    .iter()
                    .position(|p| p.ty() == ax.ty())
                    .ok_or_else(|| Error::PoolMismatch("no substitution of the occurrence's type".into()))?;
                Ok(pool.remove(i))
            })?;
            if n != 1 {
                return Err(not_typed("occurrence typed more than once"));
            }
            Ok(Sk::node(Rule::ES, vec![b, Sk::many(Rule::Many, pool)]))
        }
        StepKind::LscMultiplicative => {
            if node.rule != Rule::AppB {
                return Err(not_typed("multiplicative redex not typed by app_b"));
            }
            let mut chain = Vec::new();
            let mut cur = &node.kids[0];
            while cur.rule == Rule::ES {
                chain.push(cur.kids[1].clone());
                cur = &cur.kids[0];
            }
            if cur.rule != Rule::FunB {
                return Err(not_typed("abstraction under the redex not typed by fun_b"));
            }
            let mut out = Sk::node(Rule::ES, vec![cur.kids[0].clone(), node.kids[1].clone()]);
            for m in chain.into_iter().rev() {
                out = Sk::node(Rule::ES, vec![out, m]);
            }
            Ok(out)
        }
        _ => {
            let Term::App(f, _) = t else { return Err(not_typed("redex is not an application")) };
            let Term::Lam(_, body) = &**f else { return Err(not_typed("redex is not a β-redex")) };
            if node.rule != Rule::AppB || node.kids[0].rule != Rule::FunB {
                return Err(not_typed("β-redex not typed by app_b over fun_b"));
            }
            if node.kids[1].rule == Rule::None_ {
                return Ok(node.kids[0].kids[0].clone());
            }
            let mut pool = node.kids[1].kids.clone();
            let out = subst_sk(&node.kids[0].kids[0], body, 0, &mut pool)?;
            if !pool.is_empty() {
                return Err(Error::PoolMismatch("argument derivations left over".into()));
            }
            Ok(out)
        }
    }
}

/// Transports a derivation of a step's result back to its source.
pub fn subject_expand(phi_p: &Derivation, st: &StepRecord) -> Result<Derivation, Error> {
    let sys = phi_p.system();
    same_subject(phi_p.subject(), &st.result)?;
    let redex = st
        .source
        .at(&st.redex_path)
        .ok_or_else(|| Error::SubjectMismatch("redex path outside the source".into()))?;
    let (sk, _) = at_path(&Sk::of(phi_p), &st.result, &st.redex_path, &mut |node, t| {
        expand_local(sys, st, redex, node, t)
    })?;
    rebuild(sys, &sk, &Arc::new(st.source.clone()))
}

fn expand_local(sys: System, st: &StepRecord, redex: &Term, node: &Sk, t: &Term) -> Result<Sk, Error> {
    match st.kind {
        StepKind::LscExponential => {
            let (Term::ESub(body, _, _), Rule::ES) = (t, node.rule) else {
                return Err(not_typed("exponential contractum not typed by es"));
            };
            let occ = st.occurrence.as_deref().ok_or_else(|| not_typed("missing occurrence"))?;
            let mut moved = Vec::new();
            let (b, n) = at_path(&node.kids[0], body, &occ[1..], &mut |c, _| {
                let ty = c.ty().cloned().ok_or_else(|| not_typed("copy is not typed"))?;
                moved.push(c.clone());
                Ok(Sk::ax(ty))
            })?;
            if n != 1 {
                return Err(not_typed("copy typed more than once"));
            }
            let mut pool = node.kids[1].kids.clone();
            pool.extend(moved);
            Ok(Sk::node(Rule::ES, vec![b, Sk::many(Rule::Many, pool)]))
        }
        StepKind::LscMultiplicative => {
            let Term::App(f, _) = redex else { return Err(not_typed("redex is not an application")) };
            let mut layers = 0;
            let mut g = &**f;
            while let Term::ESub(b, _, _) = g {
                layers += 1;
                g = b;
            }
            let mut chain = Vec::new();
            let mut cur = node;
            for _ in 0..layers {
                if cur.rule != Rule::ES {
                    return Err(not_typed("substitution context not typed by es"));
                }
                chain.push(cur.kids[1].clone());
                cur = &cur.kids[0];
            }
            if cur.rule != Rule::ES {
                return Err(not_typed("created substitution not typed by es"));
            }
            let mut fun = Sk::node(Rule::FunB, vec![cur.kids[0].clone()]);
            for m in chain.into_iter().rev() {
                fun = Sk::node(Rule::ES, vec![fun, m]);
            }
            Ok(Sk::node(Rule::AppB, vec![fun, cur.kids[1].clone()]))
        }
        StepKind::MxErasing { .. } => {
            let Term::App(_, q) = redex else { return Err(not_typed("redex is not an application")) };
            if !lo_normal(q) {
                return Err(Error::NotNormal(q.to_string()));
            }
            Ok(Sk::node(
                Rule::AppB,
                vec![Sk::node(Rule::FunB, vec![node.clone()]), Sk::node(Rule::None_, vec![tnf_sk(System::Mx, q)])],
            ))
        }
        _ => {
            let Term::App(f, _) = redex else { return Err(not_typed("redex is not an application")) };
            let Term::Lam(_, body) = &**f else { return Err(not_typed("redex is not a β-redex")) };
            let mut pool = Vec::new();
            let sk_u = cut_sk(node, body, 0, &mut pool)?;
            let many = if sys == System::Mx { Rule::ManyPos } else { Rule::Many };
            if many == Rule::ManyPos && pool.is_empty() {
                return Err(not_typed("bound variable never typed"));
            }
            Ok(Sk::node(Rule::AppB, vec![Sk::node(Rule::FunB, vec![sk_u]), Sk::many(many, pool)]))
        }
    }
}

/// Evaluates `t`, types the normal form tightly and expands back along the
/// trace.
pub fn synthesize_tight(sys: System, t: &Term, fuel: usize) -> Result<(Trace, Derivation), Error> {
    let trace = evaluate(sys, t, fuel)?;
    if !trace.reached_normal {
        return Err(Error::FuelExhausted(fuel));
    }
    let d = synthesize_from_trace(&trace)?;
    Ok((trace, d))
}

/// The expansion half of [`synthesize_tight`] for a trace ending in a
/// normal form.
pub fn synthesize_from_trace(trace: &Trace) -> Result<Derivation, Error> {
    expand_along(type_normal_form(trace.system, &trace.final_term)?, &trace.steps)
}

/// Expands `d` (typing the last result) back through `steps`.
pub fn expand_along(mut d: Derivation, steps: &[StepRecord]) -> Result<Derivation, Error> {
    for st in steps.iter().rev() {
        d = subject_expand(&d, st)?;
    }
    Ok(d)
}

/// Traditional shrinking typing of an LO normal form with indices
/// `(|t|, 0)`. `tau` fixes the type of a neutral term; other normal forms
/// get the type the construction picks.
pub fn mts_type_normal_form(t: &Term, tau: Option<Type>) -> Result<Derivation, Error> {
    if !t.classify(System::Lo)?.normal {
        return Err(Error::NotNormal(t.to_string()));
    }
    if tau.is_some() && !lo_neutral(t) {
        return Err(Error::InvalidType(format!("a type can only be imposed on neutral terms, not `{t}`")));
    }
    let mut next = tau.as_ref().and_then(Type::max_atom).map_or(0, |a| a + 1);
    mts(&Arc::new(t.clone()), tau, &mut next)
}

fn mts(t: &Arc<Term>, tau: Option<Type>, next: &mut u32) -> Result<Derivation, Error> {
    let fresh = |next: &mut u32| {
        *next += 1;
        Type::Atom(*next - 1)
    };
    if let Term::Lam(h, b) = &**t {
        let body = mts(&b.open(&fresh_for(h, b)), None, next)?;
        return rebuild(System::Lo, &Sk::node(Rule::FunB, vec![Sk::of(&body)]), t);
    }
    let tau = tau.unwrap_or_else(|| fresh(next));
    let mut args = Vec::new();
    let mut head = &**t;
    while let Term::App(f, a) = head {
        args.push(a.clone());
        head = f;
    }
    args.reverse();
    let mut kids = Vec::new();
    let mut tys = Vec::new();
    for a in &args {
        let tau_a = if lo_neutral(a) { Some(fresh(next)) } else { None };
        let d = mts(a, tau_a, next)?;
        tys.push(d.conclusion().as_type().cloned().expect("mts concludes a type"));
        kids.push(Sk::of(&d));
    }
    let head_ty = tys.iter().rev().fold(tau, |acc, s| Type::arrow(MultiSet::single(s.clone()), acc));
    let mut sk = Sk::ax(head_ty);
    for k in kids {
        sk = Sk::node(Rule::AppB, vec![sk, Sk::node(Rule::Many, vec![k])]);
    }
    rebuild(System::Lo, &sk, t)
}

fn transport(phi: &Derivation, sys: System) -> Result<Derivation, Error> {
    fn set(d: &mut Derivation, sys: System) {
        d.judgement.system = sys;
        d.premises.iter_mut().for_each(|p| set(p, sys));
    }
    let mut d = phi.clone();
    set(&mut d, sys);
    complete(&mut d)?;
    Ok(d)
}

/// `L`: a head derivation read rule by rule in the linear head system.
pub fn to_lsc(phi: &Derivation) -> Result<Derivation, Error> {
    if phi.system() != System::Hd {
        return Err(Error::Format(format!("expected a head derivation, got {}", phi.system())));
    }
    transport(phi, System::Lsc)
}

/// `N`: the inverse of [`to_lsc`] on pure subjects.
pub fn to_hd(phi: &Derivation) -> Result<Derivation, Error> {
    if phi.system() != System::Lsc {
        return Err(Error::Format(format!("expected a linear head derivation, got {}", phi.system())));
    }
    if !phi.subject().is_pure() {
        return Err(Error::NonPureTerm(phi.subject().to_string()));
    }
    transport(phi, System::Hd)
}

/// `L` on head derivations, `N` on linear head ones.
pub fn head_iso(phi: &Derivation) -> Result<Derivation, Error> {
    match phi.system() {
        System::Hd => to_lsc(phi),
        _ => to_hd(phi),
    }
}

/// Head derivation of the unfolded subject with the same final typing.
pub fn check_unfolding(phi_lsc: &Derivation) -> Result<Derivation, Error> {
    if phi_lsc.system() != System::Lsc {
        return Err(Error::Format(format!("expected a linear head derivation, got {}", phi_lsc.system())));
    }
    let t = Arc::new(phi_lsc.subject().clone());
    let sk = fold_sk(&Sk::of(phi_lsc), &t)?;
    let folded = rebuild(System::Lsc, &sk, &t.unfold())?;
    to_hd(&folded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::{check, Indices};
    use crate::term::parse;

    fn t0() -> Term {
        parse(r"(\x1. (\x0. x0 x1) x1) (\z. z)").unwrap()
    }

    #[test]
    fn tight_normal_forms() {
        let d = type_normal_form(System::Hd, &parse(r"\z.z").unwrap()).unwrap();
        assert_eq!(d.indices(), Indices::new(0, 0, 1));
        let d = type_normal_form(System::Lo, &parse(r"x (\y.y)").unwrap()).unwrap();
        assert_eq!(d.indices(), Indices::new(0, 0, 2));
        assert_eq!(d.context().to_string(), "x : [N]");
        let d = type_normal_form(System::Lsc, &parse(r"\z.z").unwrap()).unwrap();
        assert_eq!(d.indices(), Indices::new(0, 0, 2));
        assert!(matches!(type_normal_form(System::Hd, &t0()), Err(Error::NotNormal(_))));
    }

    #[test]
    fn synthesize_t0() {
        let (tr, d) = synthesize_tight(System::Hd, &t0(), 100).unwrap();
        assert_eq!(tr.totals.k, 3);
        assert_eq!(d.indices(), Indices::new(6, 0, 1));
        check(&d).unwrap();
        let (tr, d) = synthesize_tight(System::Lsc, &t0(), 100).unwrap();
        assert_eq!((tr.totals.k_m, tr.totals.k_e), (3, 4));
        assert_eq!(d.indices(), Indices::new(6, 4, 2));
        check(&d).unwrap();
    }

    #[test]
    fn synthesize_mx_erasing() {
        let t = parse(r"(\x. y) ((\z.z) (\z.z))").unwrap();
        let (tr, d) = synthesize_tight(System::Mx, &t, 100).unwrap();
        assert_eq!(tr.totals.e_total, 1);
        assert_eq!(d.indices(), Indices::new(4, 0, 1));
        assert!(d.flags().mx_tight);
    }

    #[test]
    fn reduce_undoes_expand() {
        let (tr, d) = synthesize_tight(System::Hd, &t0(), 100).unwrap();
        let d1 = subject_reduce(&d, &tr.steps[0]).unwrap();
        assert_eq!(d1.indices(), Indices::new(4, 0, 1));
        assert_eq!(d1.subject(), &tr.steps[0].result);
        assert_eq!(subject_expand(&d1, &tr.steps[0]).unwrap().judgement, d.judgement);
    }

    #[test]
    fn leaf_substitution() {
        let phi = rebuild(System::Hd, &Sk::ax(Type::Atom(0)), &Arc::new(parse("x").unwrap())).unwrap();
        let py = rebuild(System::Hd, &Sk::ax(Type::Atom(0)), &Arc::new(parse("y").unwrap())).unwrap();
        let pool = DerivPool { subject: parse("y").unwrap(), members: vec![py.clone()] };
        let d = substitute_derivation(System::Hd, &phi, "x", &pool).unwrap();
        assert_eq!(d, py);
        let (back, pool2) = anti_substitute(System::Hd, &d, &parse("x").unwrap(), "x", &parse("y").unwrap()).unwrap();
        assert_eq!(back, phi);
        assert_eq!(pool2, pool);
    }

    #[test]
    fn mts_examples() {
        let d = mts_type_normal_form(&parse("x").unwrap(), Some(Type::Atom(0))).unwrap();
        assert_eq!(d.context().to_string(), "x : [a0]");
        let d = mts_type_normal_form(&parse(r"\z.z").unwrap(), None).unwrap();
        assert_eq!(d.conclusion().to_string(), "[a0] -> a0");
        assert_eq!(d.indices(), Indices::new(1, 0, 0));
        let d = mts_type_normal_form(&parse("x y").unwrap(), Some(Type::Atom(0))).unwrap();
        assert_eq!(d.context().to_string(), "x : [[a1] -> a0]; y : [a1]");
        assert_eq!(d.indices(), Indices::new(1, 0, 0));
        let f = d.flags();
        assert!(f.traditional && f.shrinking);
    }

    #[test]
    fn head_iso_on_t0() {
        let (_, d) = synthesize_tight(System::Hd, &t0(), 100).unwrap();
        let l = to_lsc(&d).unwrap();
        assert_eq!(l.indices(), Indices::new(6, 4, 2));
        assert_eq!(to_hd(&l).unwrap(), d);
        let (_, dl) = synthesize_tight(System::Lsc, &t0(), 100).unwrap();
        assert_eq!(l, dl);
    }

    #[test]
    fn unfolding_an_axiom_under_es() {
        let t = Arc::new(parse("x[x := y]").unwrap());
        let sk = Sk::node(Rule::ES, vec![Sk::ax(Type::Neutral), Sk::node(Rule::Many, vec![Sk::ax(Type::Neutral)])]);
        let d = rebuild(System::Lsc, &sk, &t).unwrap();
        assert_eq!(d.indices(), Indices::new(0, 1, 1));
        let h = check_unfolding(&d).unwrap();
        assert_eq!(h.subject(), &parse("y").unwrap());
        assert_eq!(h.indices(), Indices::new(0, 0, 0));
    }
}
