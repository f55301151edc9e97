//! Name-free derivation surgery.
//!
//! A derivation is stripped to its shape (rules plus axiom types), edited in
//! lockstep with a de Bruijn term, and then rebuilt: subjects are
//! reassigned top-down, everything else is recomputed by the checker.

use std::sync::Arc;

use crate::derivation::{blank, complete, fresh_for, Conclusion, Derivation, Rule};
use crate::error::Error;
use crate::term::{Dir, System, Term};
use crate::types::Type;

#[derive(Clone, Debug)]
pub(crate) struct Sk {
    pub rule: Rule,
    /// Needed on axioms and on anything moved in or out of a pool.
    pub ty: Option<Conclusion>,
    pub kids: Vec<Sk>,
}

impl Sk {
    pub fn of(d: &Derivation) -> Sk {
        Sk {
            rule: d.rule,
            ty: Some(d.conclusion().clone()),
            kids: d.premises.iter().map(Sk::of).collect(),
        }
    }

    pub fn node(rule: Rule, kids: Vec<Sk>) -> Sk {
        Sk { rule, ty: None, kids }
    }

    pub fn ax(t: Type) -> Sk {
        Sk { rule: Rule::Ax, ty: Some(Conclusion::Type(t)), kids: vec![] }
    }

    pub fn ty(&self) -> Option<&Type> {
        self.ty.as_ref().and_then(Conclusion::as_type)
    }

    /// A many-style node over `pool`, sorted by type.
    pub fn many(rule: Rule, mut pool: Vec<Sk>) -> Sk {
        pool.sort_by(|a, b| a.ty().cmp(&b.ty()));
        Sk::node(rule, pool)
    }
}

fn shape(msg: &str, t: &Term) -> Error {
    Error::SubjectMismatch(format!("{msg} at `{t}`"))
}

/// Rebuilds a full derivation of the locally closed `t`.
pub(crate) fn rebuild(sys: System, sk: &Sk, t: &Arc<Term>) -> Result<Derivation, Error> {
    let mut d = assign(sys, sk, t)?;
    complete(&mut d)?;
    Ok(d)
}

fn assign(sys: System, sk: &Sk, t: &Arc<Term>) -> Result<Derivation, Error> {
    let kids: Vec<Derivation> = match (sk.rule, &**t) {
        (Rule::Ax, Term::Free(_)) => vec![],
        (Rule::Ax, _) => return Err(shape("axiom on a non-variable", t)),
        (Rule::FunB | Rule::FunR, Term::Lam(h, b)) => {
            vec![assign(sys, &sk.kids[0], &b.open(&fresh_for(h, b)))?]
        }
        (Rule::AppB | Rule::AppLo, Term::App(f, a)) => {
            vec![assign(sys, &sk.kids[0], f)?, assign(sys, &sk.kids[1], a)?]
        }
        (Rule::AppHd, Term::App(f, _)) => vec![assign(sys, &sk.kids[0], f)?],
        (Rule::Many | Rule::ManyPos | Rule::None_, _) => {
            sk.kids.iter().map(|k| assign(sys, k, t)).collect::<Result<_, _>>()?
        }
        (Rule::ES, Term::ESub(b, h, a)) => {
            vec![assign(sys, &sk.kids[0], &b.open(&fresh_for(h, b)))?, assign(sys, &sk.kids[1], a)?]
        }
        (r, _) => return Err(shape(&format!("rule {r} does not fit"), t)),
    };
    let ax = if sk.rule == Rule::Ax {
        Some(sk.ty().cloned().ok_or_else(|| shape("untyped axiom", t))?)
    } else {
        None
    };
    if sk.kids.len() != kids.len() {
        return Err(shape("premise count does not fit", t));
    }
    Ok(blank(sys, sk.rule, (**t).clone(), ax, kids))
}

/// Visits a node with its term and binder depth; `None` means recurse.
type Leaf<'a> = dyn FnMut(&Sk, &Term, usize) -> Option<Result<Sk, Error>> + 'a;

/// Structural recursion shared by substitution and anti-substitution:
/// `leaf` sees every node outside many-style rules together with the term
/// it types and the depth of the target binder.
fn walk(
    sk: &Sk,
    t: &Term,
    depth: usize,
    leaf: &mut Leaf<'_>,
) -> Result<Sk, Error> {
    if sk.rule.is_many() {
        let kids = sk.kids.iter().map(|k| walk(k, t, depth, leaf)).collect::<Result<_, _>>()?;
        return Ok(Sk { kids, ..sk.clone() });
    }
    if let Some(r) = leaf(sk, t, depth) {
        return r;
    }
    let kids = match (sk.rule, t) {
        (Rule::Ax, _) => vec![],
        (Rule::FunB | Rule::FunR, Term::Lam(_, b)) => vec![walk(&sk.kids[0], b, depth + 1, leaf)?],
        (Rule::AppB | Rule::AppLo, Term::App(f, a)) => {
            vec![walk(&sk.kids[0], f, depth, leaf)?, walk(&sk.kids[1], a, depth, leaf)?]
        }
        (Rule::AppHd, Term::App(f, _)) => vec![walk(&sk.kids[0], f, depth, leaf)?],
        (Rule::ES, Term::ESub(b, _, a)) => {
            vec![walk(&sk.kids[0], b, depth + 1, leaf)?, walk(&sk.kids[1], a, depth, leaf)?]
        }
        (r, _) => return Err(shape(&format!("rule {r} does not fit"), t)),
    };
    Ok(Sk { kids, ..sk.clone() })
}

fn take(pool: &mut Vec<Sk>, ty: Option<&Type>) -> Result<Sk, Error> {
    let i = pool
        .iter()
        .position(|p| p.ty() == ty)
        .ok_or_else(|| Error::PoolMismatch(format!("no pool member of type {}", show(ty))))?;
    Ok(pool.remove(i))
}

fn show(t: Option<&Type>) -> String {
    t.map_or("?".into(), Type::to_string)
}

/// `sk` types the binder body `t`; each axiom on index `depth` is replaced
/// by a pool member of the same type, leftmost first.
pub(crate) fn subst_sk(sk: &Sk, t: &Term, depth: usize, pool: &mut Vec<Sk>) -> Result<Sk, Error> {
    walk(sk, t, depth, &mut |sk, t, d| match (sk.rule, t) {
        (Rule::Ax, Term::Bound(i)) if *i == d => Some(take(pool, sk.ty())),
        _ => None,
    })
}

/// Inverse of [`subst_sk`]: `sk` types `u{depth := q}`; every node standing
/// for an occurrence of index `depth` in `u` is cut into `out`.
pub(crate) fn cut_sk(sk: &Sk, u: &Term, depth: usize, out: &mut Vec<Sk>) -> Result<Sk, Error> {
    walk(sk, u, depth, &mut |sk, u, d| match u {
        Term::Bound(i) if *i == d => Some(match sk.ty() {
            Some(ty) => {
                out.push(sk.clone());
                Ok(Sk::ax(ty.clone()))
            }
            None => Err(shape("untyped node in anti-substitution", u)),
        }),
        _ => None,
    })
}

/// Applies `f` to every node typing the subterm at `path`; many-style
/// nodes on the way are traversed premise by premise, untyped arguments
/// are left alone. Returns the rewritten shape and how often `f` ran.
pub(crate) fn at_path(
    sk: &Sk,
    t: &Term,
    path: &[Dir],
    f: &mut dyn FnMut(&Sk, &Term) -> Result<Sk, Error>,
) -> Result<(Sk, usize), Error> {
    if sk.rule.is_many() {
        let mut n = 0;
        let mut kids = Vec::with_capacity(sk.kids.len());
        for k in &sk.kids {
            let (k2, m) = at_path(k, t, path, f)?;
            kids.push(k2);
            n += m;
        }
        return Ok((Sk { kids, ..sk.clone() }, n));
    }
    let Some((d, rest)) = path.split_first() else {
        return Ok((f(sk, t)?, 1));
    };
    let (i, sub) = match (d, sk.rule, t) {
        (Dir::Body, Rule::FunB | Rule::FunR, Term::Lam(_, b)) => (0, &**b),
        (Dir::Fun, Rule::AppB | Rule::AppLo | Rule::AppHd, Term::App(f, _)) => (0, &**f),
        (Dir::Arg, Rule::AppB | Rule::AppLo, Term::App(_, a)) => (1, &**a),
        (Dir::Arg, Rule::AppHd, Term::App(..)) => return Ok((sk.clone(), 0)),
        (Dir::EsBody, Rule::ES, Term::ESub(b, _, _)) => (0, &**b),
        (Dir::EsArg, Rule::ES, Term::ESub(_, _, a)) => (1, &**a),
        _ => return Err(shape(&format!("rule {} does not fit the path", sk.rule), t)),
    };
    let (k, n) = at_path(&sk.kids[i], sub, rest, f)?;
    let mut out = sk.clone();
    out.kids[i] = k;
    Ok((out, n))
}

/// Tight shape for a normal form (normality is the caller's business).
pub(crate) fn tnf_sk(sys: System, t: &Term) -> Sk {
    match t {
        Term::Free(_) | Term::Bound(_) => Sk::ax(Type::Neutral),
        Term::Lam(_, b) => Sk::node(Rule::FunR, vec![tnf_sk(sys, b)]),
        Term::App(f, a) => match sys {
            System::Hd | System::Lsc => Sk::node(Rule::AppHd, vec![tnf_sk(sys, f)]),
            System::Lo | System::Mx => Sk::node(Rule::AppLo, vec![tnf_sk(sys, f), tnf_sk(sys, a)]),
        },
        Term::ESub(b, _, _) => Sk::node(Rule::ES, vec![tnf_sk(sys, b), Sk::node(Rule::Many, vec![])]),
    }
}

/// Folds every ES node of an LSC shape into a meta-level substitution;
/// the result types `t.unfold()`.
pub(crate) fn fold_sk(sk: &Sk, t: &Arc<Term>) -> Result<Sk, Error> {
    if sk.rule.is_many() {
        let kids = sk.kids.iter().map(|k| fold_sk(k, t)).collect::<Result<_, _>>()?;
        return Ok(Sk { kids, ..sk.clone() });
    }
    let kids = match (sk.rule, &**t) {
        (Rule::Ax, _) => vec![],
        (Rule::FunB | Rule::FunR, Term::Lam(_, b)) => vec![fold_sk(&sk.kids[0], b)?],
        (Rule::AppB | Rule::AppLo, Term::App(f, a)) => vec![fold_sk(&sk.kids[0], f)?, fold_sk(&sk.kids[1], a)?],
        (Rule::AppHd, Term::App(f, _)) => vec![fold_sk(&sk.kids[0], f)?],
        (Rule::ES, Term::ESub(b, _, a)) => {
            let body = fold_sk(&sk.kids[0], b)?;
            let mut pool = sk.kids[1].kids.iter().map(|k| fold_sk(k, a)).collect::<Result<Vec<_>, _>>()?;
            let out = subst_sk(&body, &b.unfold(), 0, &mut pool)?;
            if !pool.is_empty() {
                return Err(Error::PoolMismatch("unused members while folding".into()));
            }
            return Ok(out);
        }
        (r, _) => return Err(shape(&format!("rule {r} does not fit"), t)),
    };
    Ok(Sk { kids, ..sk.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn arc(s: &str) -> Arc<Term> {
        Arc::new(parse(s).unwrap())
    }

    #[test]
    fn rebuild_tight_identity() {
        let t = arc(r"\z. z");
        let d = rebuild(System::Hd, &tnf_sk(System::Hd, &t), &t).unwrap();
        assert_eq!(d.indices().r, 1);
        assert_eq!(d.conclusion().to_string(), "A");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let t = arc("x y");
        let sk = Sk::node(Rule::FunR, vec![Sk::ax(Type::Neutral)]);
        assert!(matches!(rebuild(System::Hd, &sk, &t), Err(Error::SubjectMismatch(_))));
    }

    #[test]
    fn cut_then_subst_is_identity() {
        // body `x0 x0` with index 0 typed twice
        let t = arc(r"\x. x x");
        let Term::Lam(_, body) = &*t else { unreachable!() };
        let arrow: Type = "[N] -> N".parse().unwrap();
        let sk = Sk::node(
            Rule::AppB,
            vec![Sk::ax(arrow.clone()), Sk::node(Rule::Many, vec![Sk::ax(Type::Neutral)])],
        );
        let mut pool = vec![Sk::ax(Type::Neutral), Sk::ax(arrow)];
        let s = subst_sk(&sk, body, 0, &mut pool).unwrap();
        assert!(pool.is_empty());
        let mut out = vec![];
        let back = cut_sk(&s, body, 0, &mut out).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(back.kids[0].ty(), sk.kids[0].ty());
    }
}
