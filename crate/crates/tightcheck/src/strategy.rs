//! The four deterministic strategies, as single steps and as fueled runs.

use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::term::{abs_lh, lo_neutral, lo_normal, Dir, Path, System, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Beta,
    MxErasing { erased_size: usize },
    MxNonErasing,
    LscMultiplicative,
    LscExponential,
}

impl StepKind {
    pub fn erased_size(self) -> usize {
        match self {
            StepKind::MxErasing { erased_size } => erased_size,
            _ => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StepKind::Beta => "beta",
            StepKind::MxErasing { .. } => "mx-erasing",
            StepKind::MxNonErasing => "mx-non-erasing",
            StepKind::LscMultiplicative => "m",
            StepKind::LscExponential => "e",
        }
    }
}

/// One step `source → result`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub system: System,
    pub source: Term,
    pub result: Term,
    pub kind: StepKind,
    /// Position of the redex in `source` (for exponential steps: the ES).
    pub redex_path: Path,
    /// Exponential steps only: the replaced variable occurrence, relative to
    /// the ES node.
    pub occurrence: Option<Path>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub k: usize,
    pub e_total: usize,
    pub k_m: usize,
    pub k_e: usize,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub system: System,
    pub initial: Term,
    pub steps: Vec<StepRecord>,
    pub final_term: Term,
    pub reached_normal: bool,
    pub totals: Totals,
}

impl Trace {
    /// One line per step: index, kind, erased size, result.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                i + 1,
                s.kind.label(),
                s.kind.erased_size(),
                s.result
            ));
        }
        out
    }
}

/// The step prescribed by the strategy, or `None` on normal forms.
pub fn step(sys: System, t: &Term) -> Result<Option<StepRecord>, Error> {
    if sys != System::Lsc && !t.is_pure() {
        return Err(Error::NonPureTerm(t.to_string()));
    }
    let root = Arc::new(t.clone());
    let mut path = Vec::new();
    let found = match sys {
        System::Hd => hd(&root, &mut path).map(|(r, k)| (r, k, None)),
        System::Lo => lo(&root, &mut path).map(|(r, k)| (r, k, None)),
        System::Mx => mx(&root, &mut path).map(|(r, k)| (r, k, None)),
        System::Lsc => lsc(&root, &mut path),
    };
    Ok(found.map(|(result, kind, occurrence)| StepRecord {
        system: sys,
        source: t.clone(),
        result: (*result).clone(),
        kind,
        redex_path: path,
        occurrence,
    }))
}

type Found = Option<(Arc<Term>, StepKind)>;

fn under<F>(path: &mut Vec<Dir>, d: Dir, f: F) -> Option<Arc<Term>>
where
    F: FnOnce(&mut Vec<Dir>) -> Option<Arc<Term>>,
{
    path.push(d);
    let r = f(path);
    if r.is_none() {
        path.pop();
    }
    r
}

fn hd(t: &Arc<Term>, path: &mut Vec<Dir>) -> Found {
    match &**t {
        Term::App(f, a) => {
            if let Term::Lam(_, b) = &**f {
                return Some((b.instantiate(a), StepKind::Beta));
            }
            let mut kind = None;
            let f2 = under(path, Dir::Fun, |p| hd(f, p).map(|(r, k)| {
                kind = Some(k);
                r
            }))?;
            Some((Arc::new(Term::App(f2, a.clone())), kind?))
        }
        Term::Lam(h, b) => {
            let mut kind = None;
            let b2 = under(path, Dir::Body, |p| hd(b, p).map(|(r, k)| {
                kind = Some(k);
                r
            }))?;
            Some((Arc::new(Term::Lam(h.clone(), b2)), kind?))
        }
        _ => None,
    }
}

/// Shared by lo and mx: the two closure rules for applications whose
/// function part is not an abstraction.
fn app_closure(
    f: &Arc<Term>,
    a: &Arc<Term>,
    path: &mut Vec<Dir>,
    rec: fn(&Arc<Term>, &mut Vec<Dir>) -> Found,
) -> Found {
    let mut kind = None;
    if let Some(f2) = under(path, Dir::Fun, |p| rec(f, p).map(|(r, k)| {
        kind = Some(k);
        r
    })) {
        return Some((Arc::new(Term::App(f2, a.clone())), kind?));
    }
    if lo_neutral(f) {
        let a2 = under(path, Dir::Arg, |p| rec(a, p).map(|(r, k)| {
            kind = Some(k);
            r
        }))?;
        return Some((Arc::new(Term::App(f.clone(), a2)), kind?));
    }
    None
}

fn lam_closure(
    h: &crate::term::Name,
    b: &Arc<Term>,
    path: &mut Vec<Dir>,
    rec: fn(&Arc<Term>, &mut Vec<Dir>) -> Found,
) -> Found {
    let mut kind = None;
    let b2 = under(path, Dir::Body, |p| rec(b, p).map(|(r, k)| {
        kind = Some(k);
        r
    }))?;
    Some((Arc::new(Term::Lam(h.clone(), b2)), kind?))
}

fn lo(t: &Arc<Term>, path: &mut Vec<Dir>) -> Found {
    match &**t {
        Term::App(f, a) => {
            if let Term::Lam(_, b) = &**f {
                return Some((b.instantiate(a), StepKind::Beta));
            }
            app_closure(f, a, path, lo)
        }
        Term::Lam(h, b) => lam_closure(h, b, path, lo),
        _ => None,
    }
}

fn mx(t: &Arc<Term>, path: &mut Vec<Dir>) -> Found {
    match &**t {
        Term::App(f, a) => {
            if let Term::Lam(h, u) = &**f {
                if u.mentions(0) {
                    return Some((u.instantiate(a), StepKind::MxNonErasing));
                }
                if lo_normal(a) {
                    let kind = StepKind::MxErasing { erased_size: a.lo_size() };
                    return Some((u.instantiate(a), kind));
                }
                let mut kind = None;
                let a2 = under(path, Dir::Arg, |p| mx(a, p).map(|(r, k)| {
                    kind = Some(k);
                    r
                }))?;
                let _ = h;
                return Some((Arc::new(Term::App(f.clone(), a2)), kind?));
            }
            app_closure(f, a, path, mx)
        }
        Term::Lam(h, b) => lam_closure(h, b, path, mx),
        _ => None,
    }
}

/// Path from the root of `t` to its head variable through λ, application
/// and ES bodies, with the number of binders crossed.
pub(crate) fn head_path(t: &Term) -> (Path, usize) {
    let mut path = Vec::new();
    let mut depth = 0;
    let mut cur = t;
    loop {
        match cur {
            Term::Lam(_, b) => {
                path.push(Dir::Body);
                depth += 1;
                cur = b;
            }
            Term::App(f, _) => {
                path.push(Dir::Fun);
                cur = f;
            }
            Term::ESub(b, _, _) => {
                path.push(Dir::EsBody);
                depth += 1;
                cur = b;
            }
            Term::Free(_) | Term::Bound(_) => return (path, depth),
        }
    }
}

/// `Some(occurrence path)` when `body` is `H⟨x⟩` for the variable bound
/// just outside it.
pub(crate) fn bound_head(body: &Term) -> Option<(Path, usize)> {
    let (path, depth) = head_path(body);
    matches!(body.at(&path), Some(Term::Bound(i)) if *i == depth).then_some((path, depth))
}

pub(crate) fn replace_at(t: &Arc<Term>, path: &[Dir], new: Arc<Term>) -> Arc<Term> {
    let Some((d, rest)) = path.split_first() else { return new };
    Arc::new(match (d, &**t) {
        (Dir::Body, Term::Lam(h, b)) => Term::Lam(h.clone(), replace_at(b, rest, new)),
        (Dir::Fun, Term::App(f, a)) => Term::App(replace_at(f, rest, new), a.clone()),
        (Dir::Arg, Term::App(f, a)) => Term::App(f.clone(), replace_at(a, rest, new)),
        (Dir::EsBody, Term::ESub(b, h, a)) => Term::ESub(replace_at(b, rest, new), h.clone(), a.clone()),
        (Dir::EsArg, Term::ESub(b, h, a)) => Term::ESub(b.clone(), h.clone(), replace_at(a, rest, new)),
        _ => panic!("invalid path"),
    })
}

/// `L⟨λx.t⟩ u → L⟨t[x:=u]⟩`.
fn distant_beta(f: &Arc<Term>, u: &Arc<Term>, depth: usize) -> Arc<Term> {
    match &**f {
        Term::Lam(h, t) => Arc::new(Term::ESub(t.clone(), h.clone(), u.shift(depth, 0))),
        Term::ESub(b, h, p) => Arc::new(Term::ESub(distant_beta(b, u, depth + 1), h.clone(), p.clone())),
        _ => unreachable!("abs_lh checked by the caller"),
    }
}

type LscFound = Option<(Arc<Term>, StepKind, Option<Path>)>;

fn lsc(t: &Arc<Term>, path: &mut Vec<Dir>) -> LscFound {
    match &**t {
        Term::App(f, a) => {
            if abs_lh(f) {
                return Some((distant_beta(f, a, 0), StepKind::LscMultiplicative, None));
            }
            path.push(Dir::Fun);
            match lsc(f, path) {
                Some((f2, k, o)) => Some((Arc::new(Term::App(f2, a.clone())), k, o)),
                None => {
                    path.pop();
                    None
                }
            }
        }
        Term::Lam(h, b) => {
            path.push(Dir::Body);
            match lsc(b, path) {
                Some((b2, k, o)) => Some((Arc::new(Term::Lam(h.clone(), b2)), k, o)),
                None => {
                    path.pop();
                    None
                }
            }
        }
        Term::ESub(b, h, p) => {
            if let Some((occ, depth)) = bound_head(b) {
                let body = replace_at(b, &occ, p.shift(depth + 1, 0));
                let mut rel = vec![Dir::EsBody];
                rel.extend(occ);
                return Some((
                    Arc::new(Term::ESub(body, h.clone(), p.clone())),
                    StepKind::LscExponential,
                    Some(rel),
                ));
            }
            path.push(Dir::EsBody);
            match lsc(b, path) {
                Some((b2, k, o)) => Some((Arc::new(Term::ESub(b2, h.clone(), p.clone())), k, o)),
                None => {
                    path.pop();
                    None
                }
            }
        }
        _ => None,
    }
}

/// Iterates `step` at most `fuel` times.
pub fn evaluate(sys: System, t: &Term, fuel: usize) -> Result<Trace, Error> {
    Ok(evaluate_capped(sys, t, fuel, None)?.0)
}

/// Like [`evaluate`], additionally stopping (with `true`) once an
/// intermediate term has more than `node_cap` constructors.
pub fn evaluate_capped(
    sys: System,
    t: &Term,
    fuel: usize,
    node_cap: Option<usize>,
) -> Result<(Trace, bool), Error> {
    if sys != System::Lsc && !t.is_pure() {
        return Err(Error::NonPureTerm(t.to_string()));
    }
    let mut steps = Vec::new();
    let mut cur = t.clone();
    let mut totals = Totals::default();
    let mut capped = false;
    let mut reached_normal = false;
    loop {
        let Some(s) = step(sys, &cur)? else {
            reached_normal = true;
            break;
        };
        if steps.len() == fuel {
            break;
        }
        totals.k += 1;
        totals.e_total += s.kind.erased_size();
        match s.kind {
            StepKind::LscExponential => totals.k_e += 1,
            _ => totals.k_m += 1,
        }
        cur = s.result.clone();
        steps.push(s);
        if let Some(cap) = node_cap {
            if cur.node_count(cap + 1) > cap {
                capped = true;
                break;
            }
        }
    }
    Ok((
        Trace { system: sys, initial: t.clone(), steps, final_term: cur, reached_normal, totals },
        capped,
    ))
}

/// Number of distinct ways the strategy's inference rules derive a step from
/// `t`. Written independently of [`step`], rule by rule, so that it can serve
/// as a determinism oracle: deterministic strategies give at most 1, and 0
/// exactly on normal forms.
pub fn applicable_rules(sys: System, t: &Term) -> usize {
    match sys {
        System::Hd => count_hd(t),
        System::Lo => count_lo(t),
        System::Mx => count_mx(t),
        System::Lsc => count_lsc(t),
    }
}

fn count_hd(t: &Term) -> usize {
    match t {
        Term::App(f, _) => usize::from(f.is_lam()) + if !f.is_lam() { count_hd(f) } else { 0 },
        Term::Lam(_, b) => count_hd(b),
        _ => 0,
    }
}

fn count_lo(t: &Term) -> usize {
    match t {
        Term::App(f, a) => {
            usize::from(f.is_lam())
                + if !f.is_lam() { count_lo(f) } else { 0 }
                + if lo_neutral(f) { count_lo(a) } else { 0 }
        }
        Term::Lam(_, b) => count_lo(b),
        _ => 0,
    }
}

fn count_mx(t: &Term) -> usize {
    match t {
        Term::App(f, a) => {
            let mut n = 0;
            if let Term::Lam(_, u) = &**f {
                let x_free = u.mentions(0);
                n += usize::from(x_free);
                n += usize::from(!x_free && lo_normal(a));
                if !x_free {
                    n += count_mx(a);
                }
            }
            if !f.is_lam() {
                n += count_mx(f);
            }
            if lo_neutral(f) {
                n += count_mx(a);
            }
            n
        }
        Term::Lam(_, b) => count_mx(b),
        _ => 0,
    }
}

fn plugs_bound(t: &Term, k: usize) -> bool {
    match t {
        Term::Bound(i) => *i == k,
        Term::Free(_) => false,
        Term::Lam(_, b) | Term::ESub(b, _, _) => plugs_bound(b, k + 1),
        Term::App(f, _) => plugs_bound(f, k),
    }
}

fn count_lsc(t: &Term) -> usize {
    match t {
        Term::App(f, _) => {
            let m = usize::from(abs_lh(f));
            m + if !abs_lh(f) { count_lsc(f) } else { 0 }
        }
        Term::Lam(_, b) => count_lsc(b),
        Term::ESub(b, _, _) => {
            let e = plugs_bound(b, 0);
            usize::from(e) + if !e { count_lsc(b) } else { 0 }
        }
        _ => 0,
    }
}
