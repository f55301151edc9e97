//! Typing derivations for the four systems and a checker that re-derives
//! every judgement, indices included, from the premises.

use std::fmt;
use std::sync::Arc;

use crate::error::{CheckError, CheckErrorKind};
use crate::term::{Name, System, Term};
use crate::types::{context_is_shrinking, type_is_shrinking, Context, MultiSet, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Ax,
    FunB,
    FunR,
    AppB,
    /// `@hd`; in the linear head system this is the one-premise rule that
    /// types only the function part.
    AppHd,
    AppLo,
    Many,
    /// `many` with at least one premise (maximal system).
    ManyPos,
    /// `none`: one premise of any type, concluding `[]` (maximal system).
    None_,
    ES,
}

impl Rule {
    pub const ALL: [Rule; 10] = [
        Rule::Ax,
        Rule::FunB,
        Rule::FunR,
        Rule::AppB,
        Rule::AppHd,
        Rule::AppLo,
        Rule::Many,
        Rule::ManyPos,
        Rule::None_,
        Rule::ES,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::FunB => "fun_b",
            Rule::FunR => "fun_r",
            Rule::AppB => "app_b",
            Rule::AppHd => "app_hd",
            Rule::AppLo => "app_lo",
            Rule::Many => "many",
            Rule::ManyPos => "many_pos",
            Rule::None_ => "none",
            Rule::ES => "es",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == s)
    }

    /// Rules concluding a multiset.
    pub fn is_many(self) -> bool {
        matches!(self, Rule::Many | Rule::ManyPos | Rule::None_)
    }

    pub fn admissible(self, sys: System) -> bool {
        use Rule::*;
        match self {
            Ax | FunB | FunR | AppB => true,
            AppHd => matches!(sys, System::Hd | System::Lsc),
            AppLo => matches!(sys, System::Lo | System::Mx),
            Many => sys != System::Mx,
            ManyPos | None_ => sys == System::Mx,
            ES => sys == System::Lsc,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Conclusion {
    Type(Type),
    Multi(MultiSet),
}

impl Conclusion {
    pub fn as_type(&self) -> Option<&Type> {
        match self {
            Conclusion::Type(t) => Some(t),
            Conclusion::Multi(_) => None,
        }
    }

    pub fn as_multi(&self) -> Option<&MultiSet> {
        match self {
            Conclusion::Multi(m) => Some(m),
            Conclusion::Type(_) => None,
        }
    }

    pub fn is_tight(&self) -> bool {
        match self {
            Conclusion::Type(t) => t.is_tight(),
            Conclusion::Multi(m) => m.is_tight(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Conclusion::Type(t) => t.size(),
            Conclusion::Multi(m) => m.size(),
        }
    }

    fn mentions_tight(&self) -> bool {
        match self {
            Conclusion::Type(t) => t.mentions_tight(),
            Conclusion::Multi(m) => m.mentions_tight(),
        }
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Type(t) => t.fmt(f),
            Conclusion::Multi(m) => m.fmt(f),
        }
    }
}

/// `(b, r)`, or `(b, e, r)` in the linear head system; `e` is 0 elsewhere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Indices {
    pub b: usize,
    pub e: usize,
    pub r: usize,
}

impl Indices {
    pub fn new(b: usize, e: usize, r: usize) -> Indices {
        Indices { b, e, r }
    }

    pub fn show(&self, sys: System) -> String {
        if sys == System::Lsc {
            format!("({},{},{})", self.b, self.e, self.r)
        } else {
            format!("({},{})", self.b, self.r)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgement {
    pub system: System,
    pub context: Context,
    pub subject: Term,
    pub conclusion: Conclusion,
    pub indices: Indices,
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ⊢{} {} : {}",
            self.context,
            self.indices.show(self.system),
            self.subject,
            self.conclusion
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub judgement: Judgement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DerivFlags {
    pub tight: bool,
    pub garbage_tight: bool,
    pub mx_tight: bool,
    pub traditional: bool,
    pub shrinking: bool,
}

impl Derivation {
    pub fn system(&self) -> System {
        self.judgement.system
    }

    pub fn indices(&self) -> Indices {
        self.judgement.indices
    }

    pub fn subject(&self) -> &Term {
        &self.judgement.subject
    }

    pub fn context(&self) -> &Context {
        &self.judgement.context
    }

    pub fn conclusion(&self) -> &Conclusion {
        &self.judgement.conclusion
    }

    /// Pre-order walk.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let d = out[i];
            out.extend(d.premises.iter());
            i += 1;
        }
        out
    }

    /// Number of rules, not counting those the system excludes from sizes.
    pub fn size(&self) -> usize {
        let excluded = |r: Rule| match self.system() {
            System::Hd | System::Lo => matches!(r, Rule::Ax | Rule::Many),
            System::Mx => matches!(r, Rule::Ax | Rule::ManyPos | Rule::None_),
            System::Lsc => r == Rule::Many,
        };
        self.nodes().iter().filter(|d| !excluded(d.rule)).count()
    }

    pub fn count_rule(&self, rule: Rule) -> usize {
        self.nodes().iter().filter(|d| d.rule == rule).count()
    }

    /// `|Γ| + |τ|` of the final judgement.
    pub fn type_size(&self) -> usize {
        self.context().size() + self.conclusion().size()
    }

    pub fn flags(&self) -> DerivFlags {
        let tight = self.context().is_tight() && self.conclusion().is_tight();
        let garbage_tight = self.nodes().iter().filter(|d| d.rule == Rule::None_).all(|d| {
            d.premises
                .first()
                .and_then(|p| p.conclusion().as_type())
                .is_some_and(Type::is_tight)
        });
        let traditional = self
            .nodes()
            .iter()
            .all(|d| !d.context().mentions_tight() && !d.conclusion().mentions_tight());
        let shrinking = context_is_shrinking(self.context())
            && match self.conclusion() {
                Conclusion::Type(t) => type_is_shrinking(t),
                Conclusion::Multi(m) => m.iter().all(type_is_shrinking),
            };
        DerivFlags { tight, garbage_tight, mx_tight: tight && garbage_tight, traditional, shrinking }
    }

    /// Indented rendering, one judgement per line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_into(0, &mut out);
        out
    }

    fn pretty_into(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("{}  {}\n", self.rule, self.judgement));
        for p in &self.premises {
            p.pretty_into(depth + 1, out);
        }
    }
}

/// Validates every node; returns the final judgement.
pub fn check(d: &Derivation) -> Result<Judgement, CheckError> {
    let mut d2 = d.clone();
    recompute(&mut d2, d.system(), &mut Vec::new(), Fill::Nothing)?;
    Ok(d.judgement.clone())
}

/// Fills in all indices bottom-up, checking everything else.
pub fn infer_indices(skeleton: &Derivation) -> Result<Derivation, CheckError> {
    let mut d = skeleton.clone();
    recompute(&mut d, skeleton.system(), &mut Vec::new(), Fill::Indices)?;
    Ok(d)
}

/// Fills in contexts, non-axiom conclusions and indices; only rules,
/// subjects and axiom types are read.
pub(crate) fn complete(d: &mut Derivation) -> Result<(), CheckError> {
    let sys = d.system();
    recompute(d, sys, &mut Vec::new(), Fill::All)
}

#[derive(Clone, Copy, PartialEq)]
enum Fill {
    Nothing,
    Indices,
    All,
}

type NodeErr = (CheckErrorKind, String);

fn recompute(d: &mut Derivation, sys: System, path: &mut Vec<usize>, fill: Fill) -> Result<(), CheckError> {
    for (i, p) in d.premises.iter_mut().enumerate() {
        path.push(i);
        recompute(p, sys, path, fill)?;
        path.pop();
    }
    let at = |kind, detail: String| CheckError { kind, path: path.clone(), detail };
    if d.judgement.system != sys {
        return Err(at(
            CheckErrorKind::RuleMismatch,
            format!("node in system {} inside a {} derivation", d.judgement.system, sys),
        ));
    }
    let ax_type = d.judgement.conclusion.as_type().cloned();
    let (ctx, concl, idx) =
        judge_node(sys, d.rule, &d.judgement.subject, &d.premises, ax_type.as_ref()).map_err(|(k, m)| at(k, m))?;
    if sys == System::Mx {
        let fv = d.judgement.subject.free_vars();
        if !ctx.domain().eq(fv.iter()) {
            return Err(at(
                CheckErrorKind::ContextMismatch,
                format!("domain of `{ctx}` differs from the free variables of the subject"),
            ));
        }
    }
    if fill == Fill::All {
        d.judgement.context = ctx;
        d.judgement.conclusion = concl;
        d.judgement.indices = idx;
        return Ok(());
    }
    if ctx != d.judgement.context {
        return Err(at(
            CheckErrorKind::ContextMismatch,
            format!("expected context `{ctx}`, found `{}`", d.judgement.context),
        ));
    }
    if concl != d.judgement.conclusion {
        return Err(at(
            CheckErrorKind::TypeMismatch,
            format!("expected `{concl}`, found `{}`", d.judgement.conclusion),
        ));
    }
    if fill == Fill::Indices {
        d.judgement.indices = idx;
    } else if idx != d.judgement.indices {
        return Err(at(
            CheckErrorKind::IndexMismatch,
            format!("expected {}, found {}", idx.show(sys), d.judgement.indices.show(sys)),
        ));
    }
    Ok(())
}

/// Finds the name a binder body was opened with: `opened` must be `body`
/// with index 0 replaced by one fresh name. `None` for vacuous binders.
pub(crate) fn opened_name(body: &Term, opened: &Term) -> Result<Option<Name>, String> {
    fn walk(b: &Term, o: &Term, depth: usize, found: &mut Option<Name>) -> bool {
        match (b, o) {
            (Term::Bound(i), Term::Free(y)) if *i == depth => match found {
                Some(n) => n == y,
                None => {
                    *found = Some(y.clone());
                    true
                }
            },
            (Term::Bound(i), Term::Bound(j)) => i == j && *i < depth,
            (Term::Free(a), Term::Free(c)) => a == c,
            (Term::Lam(_, x), Term::Lam(_, y)) => walk(x, y, depth + 1, found),
            (Term::App(f, a), Term::App(g, c)) => walk(f, g, depth, found) && walk(a, c, depth, found),
            (Term::ESub(x, _, a), Term::ESub(y, _, c)) => {
                walk(x, y, depth + 1, found) && walk(a, c, depth, found)
            }
            _ => false,
        }
    }
    let mut found = None;
    if !walk(body, opened, 0, &mut found) {
        return Err(format!("premise subject `{opened}` is not the opened binder body"));
    }
    if let Some(y) = &found {
        if body.has_free(y) {
            return Err(format!("binder opened with `{y}`, which is already free in the body"));
        }
    }
    Ok(found)
}

fn sub(a: usize, b: usize, what: &str) -> Result<usize, NodeErr> {
    a.checked_sub(b)
        .ok_or_else(|| (CheckErrorKind::NegativeIndex, format!("{what}: {a} - {b} < 0")))
}

fn judge_node(
    sys: System,
    rule: Rule,
    subject: &Term,
    premises: &[Derivation],
    ax_type: Option<&Type>,
) -> Result<(Context, Conclusion, Indices), NodeErr> {
    use CheckErrorKind::*;
    if !rule.admissible(sys) {
        return Err((RuleMismatch, format!("rule {rule} is not part of system {sys}")));
    }
    let arity = |n: usize| -> Result<(), NodeErr> {
        if premises.len() == n {
            Ok(())
        } else {
            Err((RuleMismatch, format!("rule {rule} expects {n} premise(s), found {}", premises.len())))
        }
    };
    let same_subject = |p: &Derivation, t: &Term| -> Result<(), NodeErr> {
        if p.subject() == t {
            Ok(())
        } else {
            Err((RuleMismatch, format!("premise subject `{}` should be `{t}`", p.subject())))
        }
    };
    let premise_type = |p: &Derivation| -> Result<Type, NodeErr> {
        p.conclusion()
            .as_type()
            .cloned()
            .ok_or_else(|| (RuleMismatch, format!("premise of {rule} must conclude a type")))
    };
    let lsc = sys == System::Lsc;
    match rule {
        Rule::Ax => {
            arity(0)?;
            let Term::Free(x) = subject else {
                return Err((RuleMismatch, format!("ax on non-variable `{subject}`")));
            };
            let t = ax_type.ok_or((RuleMismatch, "ax must conclude a type".to_string()))?;
            let idx = Indices::new(0, 0, usize::from(lsc));
            Ok((Context::single(x.clone(), MultiSet::single(t.clone())), Conclusion::Type(t.clone()), idx))
        }
        Rule::FunB | Rule::FunR => {
            arity(1)?;
            let Term::Lam(_, body) = subject else {
                return Err((RuleMismatch, format!("{rule} on non-abstraction `{subject}`")));
            };
            let p = &premises[0];
            let y = opened_name(body, p.subject()).map_err(|m| (RuleMismatch, m))?;
            let m = y.as_deref().map(|y| p.context().get(y)).unwrap_or_default();
            let ctx = match &y {
                Some(y) => p.context().restrict(y),
                None => p.context().clone(),
            };
            let tau = premise_type(p)?;
            let pi = p.indices();
            if rule == Rule::FunB {
                let idx = if lsc {
                    Indices::new(pi.b + 1, pi.e + m.len(), sub(pi.r, m.len(), "fun_b")?)
                } else {
                    Indices::new(pi.b + 1, 0, pi.r)
                };
                Ok((ctx, Conclusion::Type(Type::arrow(m, tau)), idx))
            } else {
                if !tau.is_tight() {
                    return Err((SideConditionViolation, format!("fun_r premise type `{tau}` is not tight")));
                }
                if !m.is_tight() {
                    return Err((SideConditionViolation, format!("fun_r bound variable typed `{m}`, not tight")));
                }
                Ok((ctx, Conclusion::Type(Type::Abs), Indices::new(pi.b, pi.e, pi.r + 1)))
            }
        }
        Rule::AppB | Rule::AppHd | Rule::AppLo => {
            let Term::App(f, a) = subject else {
                return Err((RuleMismatch, format!("{rule} on non-application `{subject}`")));
            };
            arity(if rule == Rule::AppHd { 1 } else { 2 })?;
            let pf = &premises[0];
            same_subject(pf, f)?;
            let tf = premise_type(pf)?;
            let fi = pf.indices();
            match rule {
                Rule::AppB => {
                    let pa = &premises[1];
                    same_subject(pa, a)?;
                    if !pa.rule.is_many() {
                        return Err((RuleMismatch, "app_b argument premise must be a many-style rule".into()));
                    }
                    let Type::Arrow(dom, cod) = tf else {
                        return Err((TypeMismatch, format!("app_b function typed `{tf}`, not an arrow")));
                    };
                    let got = pa.conclusion().as_multi().cloned().unwrap_or_default();
                    if got != dom {
                        return Err((TypeMismatch, format!("argument typed `{got}`, domain is `{dom}`")));
                    }
                    let ai = pa.indices();
                    Ok((
                        pf.context().union(pa.context()),
                        Conclusion::Type(*cod),
                        Indices::new(fi.b + ai.b + 1, fi.e + ai.e, fi.r + ai.r),
                    ))
                }
                Rule::AppHd => {
                    if tf != Type::Neutral {
                        return Err((SideConditionViolation, format!("{rule} function typed `{tf}`, not N")));
                    }
                    Ok((pf.context().clone(), Conclusion::Type(Type::Neutral), Indices::new(fi.b, fi.e, fi.r + 1)))
                }
                _ => {
                    if tf != Type::Neutral {
                        return Err((SideConditionViolation, format!("app_lo function typed `{tf}`, not N")));
                    }
                    let pa = &premises[1];
                    same_subject(pa, a)?;
                    let ta = premise_type(pa)?;
                    if !ta.is_tight() {
                        return Err((SideConditionViolation, format!("app_lo argument typed `{ta}`, not tight")));
                    }
                    let ai = pa.indices();
                    Ok((
                        pf.context().union(pa.context()),
                        Conclusion::Type(Type::Neutral),
                        Indices::new(fi.b + ai.b, fi.e + ai.e, fi.r + ai.r + 1),
                    ))
                }
            }
        }
        Rule::Many | Rule::ManyPos => {
            if rule == Rule::ManyPos && premises.is_empty() {
                return Err((SideConditionViolation, "many_pos needs at least one premise".into()));
            }
            let mut ctx = Context::empty();
            let mut idx = Indices::default();
            let mut tys = Vec::new();
            for p in premises {
                same_subject(p, subject)?;
                tys.push(premise_type(p)?);
                ctx = ctx.union(p.context());
                let pi = p.indices();
                idx = Indices::new(idx.b + pi.b, idx.e + pi.e, idx.r + pi.r);
            }
            Ok((ctx, Conclusion::Multi(MultiSet::new(tys)), idx))
        }
        Rule::None_ => {
            arity(1)?;
            let p = &premises[0];
            same_subject(p, subject)?;
            premise_type(p)?;
            Ok((p.context().clone(), Conclusion::Multi(MultiSet::empty()), p.indices()))
        }
        Rule::ES => {
            arity(2)?;
            let Term::ESub(body, _, arg) = subject else {
                return Err((RuleMismatch, format!("es on `{subject}`")));
            };
            let (pb, pa) = (&premises[0], &premises[1]);
            let y = opened_name(body, pb.subject()).map_err(|m| (RuleMismatch, m))?;
            same_subject(pa, arg)?;
            if pa.rule != Rule::Many {
                return Err((RuleMismatch, "es argument premise must be many".into()));
            }
            let m = y.as_deref().map(|y| pb.context().get(y)).unwrap_or_default();
            let got = pa.conclusion().as_multi().cloned().unwrap_or_default();
            if got != m {
                return Err((TypeMismatch, format!("substitution typed `{got}`, variable needs `{m}`")));
            }
            let ctx = match &y {
                Some(y) => pb.context().restrict(y),
                None => pb.context().clone(),
            };
            let (bi, ai) = (pb.indices(), pa.indices());
            let idx = Indices::new(bi.b + ai.b, bi.e + ai.e + m.len(), sub(bi.r + ai.r, m.len(), "es")?);
            Ok((ctx.union(pa.context()), Conclusion::Type(premise_type(pb)?), idx))
        }
    }
}

/// A node whose context, conclusion (except for axioms) and indices are
/// placeholders, to be filled by [`complete`].
pub(crate) fn blank(sys: System, rule: Rule, subject: Term, ax: Option<Type>, premises: Vec<Derivation>) -> Derivation {
    Derivation {
        rule,
        premises,
        judgement: Judgement {
            system: sys,
            context: Context::empty(),
            subject,
            conclusion: Conclusion::Type(ax.unwrap_or(Type::Neutral)),
            indices: Indices::default(),
        },
    }
}

/// A fresh name for opening `body`: the hint, primed until not free in it.
pub(crate) fn fresh_for(hint: &str, body: &Term) -> Name {
    let mut n = if hint.is_empty() { "x".to_string() } else { hint.to_string() };
    while body.has_free(&n) {
        n.push('\'');
    }
    Arc::from(n.as_str())
}
