//! Terms of the λ-calculus, optionally with explicit substitutions.
//!
//! Bound variables are de Bruijn indices and free variables are names; each
//! binder keeps the name it was written with as a printing hint. Equality
//! ignores hints, so `==` is alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, ParseError};

pub type Name = Arc<str>;

#[derive(Clone, Debug)]
pub enum Term {
    Free(Name),
    Bound(usize),
    Lam(Name, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    /// `body[x := arg]`; `x` is index 0 inside `body`.
    ESub(Arc<Term>, Name, Arc<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        use Term::*;
        match (self, other) {
            (Free(a), Free(b)) => a == b,
            (Bound(i), Bound(j)) => i == j,
            (Lam(_, a), Lam(_, b)) => Arc::ptr_eq(a, b) || a == b,
            (App(f, a), App(g, b)) => {
                (Arc::ptr_eq(f, g) || f == g) && (Arc::ptr_eq(a, b) || a == b)
            }
            (ESub(t, _, a), ESub(u, _, b)) => {
                (Arc::ptr_eq(t, u) || t == u) && (Arc::ptr_eq(a, b) || a == b)
            }
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Free(n) => {
                0u8.hash(state);
                n.hash(state)
            }
            Term::Bound(i) => {
                1u8.hash(state);
                i.hash(state)
            }
            Term::Lam(_, b) => {
                2u8.hash(state);
                b.hash(state)
            }
            Term::App(f, a) => {
                3u8.hash(state);
                f.hash(state);
                a.hash(state)
            }
            Term::ESub(b, _, a) => {
                4u8.hash(state);
                b.hash(state);
                a.hash(state)
            }
        }
    }
}

/// The four evaluation systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Hd,
    Lo,
    Mx,
    Lsc,
}

impl System {
    pub const ALL: [System; 4] = [System::Hd, System::Lo, System::Mx, System::Lsc];

    pub fn name(self) -> &'static str {
        match self {
            System::Hd => "hd",
            System::Lo => "lo",
            System::Mx => "mx",
            System::Lsc => "lsc",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hd" | "head" => Ok(System::Hd),
            "lo" => Ok(System::Lo),
            "mx" | "max" => Ok(System::Mx),
            "lsc" | "lhd" => Ok(System::Lsc),
            other => Err(format!("unknown system `{other}` (expected hd, lo, mx or lsc)")),
        }
    }
}

/// The three predicates of an evaluation system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Classification {
    pub normal: bool,
    pub neutral: bool,
    pub abs: bool,
}

// ---------------------------------------------------------------------------
// Construction

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Free(Arc::from(name))
    }

    /// `λname. body`, binding the free occurrences of `name` in `body`.
    pub fn lam(name: &str, body: Term) -> Term {
        Term::Lam(Arc::from(name), Arc::new(body.abstract_name(name, 0)))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// `body[name := arg]`.
    pub fn esub(body: Term, name: &str, arg: Term) -> Term {
        Term::ESub(
            Arc::new(body.abstract_name(name, 0)),
            Arc::from(name),
            Arc::new(arg),
        )
    }

    /// Left-nested application `head a1 … an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    fn abstract_name(&self, name: &str, depth: usize) -> Term {
        match self {
            Term::Free(n) if &**n == name => Term::Bound(depth),
            Term::Free(_) | Term::Bound(_) => self.clone(),
            Term::Lam(h, b) => Term::Lam(h.clone(), Arc::new(b.abstract_name(name, depth + 1))),
            Term::App(f, a) => Term::App(
                Arc::new(f.abstract_name(name, depth)),
                Arc::new(a.abstract_name(name, depth)),
            ),
            Term::ESub(b, h, a) => Term::ESub(
                Arc::new(b.abstract_name(name, depth + 1)),
                h.clone(),
                Arc::new(a.abstract_name(name, depth)),
            ),
        }
    }
}

// ---------------------------------------------------------------------------
// Indices and substitution

impl Term {
    pub fn is_pure(&self) -> bool {
        match self {
            Term::Free(_) | Term::Bound(_) => true,
            Term::Lam(_, b) => b.is_pure(),
            Term::App(f, a) => f.is_pure() && a.is_pure(),
            Term::ESub(..) => false,
        }
    }

    /// Free names (loose indices are not names and are not reported).
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Free(n) => {
                out.insert(n.clone());
            }
            Term::Bound(_) => {}
            Term::Lam(_, b) => b.collect_free(out),
            Term::App(f, a) | Term::ESub(f, _, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Term::Free(n) => &**n == name,
            Term::Bound(_) => false,
            Term::Lam(_, b) => b.has_free(name),
            Term::App(f, a) | Term::ESub(f, _, a) => f.has_free(name) || a.has_free(name),
        }
    }

    /// Does index `k` (relative to this term) occur?
    pub fn mentions(&self, k: usize) -> bool {
        match self {
            Term::Free(_) => false,
            Term::Bound(i) => *i == k,
            Term::Lam(_, b) => b.mentions(k + 1),
            Term::App(f, a) => f.mentions(k) || a.mentions(k),
            Term::ESub(b, _, a) => b.mentions(k + 1) || a.mentions(k),
        }
    }

    /// True when no de Bruijn index escapes the term.
    pub fn is_locally_closed(&self) -> bool {
        self.max_loose(0).is_none()
    }

    fn max_loose(&self, depth: usize) -> Option<usize> {
        match self {
            Term::Free(_) => None,
            Term::Bound(i) => (*i >= depth).then(|| i - depth),
            Term::Lam(_, b) => b.max_loose(depth + 1),
            Term::App(f, a) => f.max_loose(depth).max(a.max_loose(depth)),
            Term::ESub(b, _, a) => b.max_loose(depth + 1).max(a.max_loose(depth)),
        }
    }

    /// Adds `d` to every index `>= cutoff`.
    pub fn shift(self: &Arc<Self>, d: usize, cutoff: usize) -> Arc<Term> {
        if d == 0 || self.max_loose(cutoff).is_none() {
            return self.clone();
        }
        Arc::new(match &**self {
            Term::Free(_) => unreachable!(),
            Term::Bound(i) => Term::Bound(if *i >= cutoff { i + d } else { *i }),
            Term::Lam(h, b) => Term::Lam(h.clone(), b.shift(d, cutoff + 1)),
            Term::App(f, a) => Term::App(f.shift(d, cutoff), a.shift(d, cutoff)),
            Term::ESub(b, h, a) => Term::ESub(b.shift(d, cutoff + 1), h.clone(), a.shift(d, cutoff)),
        })
    }

    /// Replaces index 0 of `self` (a binder body) by `arg`, lowering the
    /// other loose indices by one.
    pub fn instantiate(self: &Arc<Self>, arg: &Arc<Term>) -> Arc<Term> {
        self.inst_at(0, arg)
    }

    fn inst_at(self: &Arc<Self>, depth: usize, arg: &Arc<Term>) -> Arc<Term> {
        if self.max_loose(depth).is_none() {
            return self.clone();
        }
        match &**self {
            Term::Free(_) => self.clone(),
            Term::Bound(i) => {
                if *i == depth {
                    arg.shift(depth, 0)
                } else if *i > depth {
                    Arc::new(Term::Bound(i - 1))
                } else {
                    self.clone()
                }
            }
            Term::Lam(h, b) => Arc::new(Term::Lam(h.clone(), b.inst_at(depth + 1, arg))),
            Term::App(f, a) => Arc::new(Term::App(f.inst_at(depth, arg), a.inst_at(depth, arg))),
            Term::ESub(b, h, a) => Arc::new(Term::ESub(
                b.inst_at(depth + 1, arg),
                h.clone(),
                a.inst_at(depth, arg),
            )),
        }
    }

    /// Instantiates a binder body with a free name.
    pub fn open(self: &Arc<Self>, name: &Name) -> Arc<Term> {
        self.instantiate(&Arc::new(Term::Free(name.clone())))
    }

    /// Capture-avoiding `t{x := u}` on free occurrences of the name `x`.
    pub fn substitute(&self, x: &str, u: &Term) -> Term {
        let u = Arc::new(u.clone());
        (*self.subst_name(x, &u, 0)).clone()
    }

    fn subst_name(&self, x: &str, u: &Arc<Term>, depth: usize) -> Arc<Term> {
        match self {
            Term::Free(n) if &**n == x => u.shift(depth, 0),
            Term::Free(_) | Term::Bound(_) => Arc::new(self.clone()),
            Term::Lam(h, b) => Arc::new(Term::Lam(h.clone(), b.subst_name(x, u, depth + 1))),
            Term::App(f, a) => Arc::new(Term::App(f.subst_name(x, u, depth), a.subst_name(x, u, depth))),
            Term::ESub(b, h, a) => Arc::new(Term::ESub(
                b.subst_name(x, u, depth + 1),
                h.clone(),
                a.subst_name(x, u, depth),
            )),
        }
    }

    /// Turns every explicit substitution into a meta-level one.
    pub fn unfold(self: &Arc<Self>) -> Arc<Term> {
        if self.is_pure() {
            return self.clone();
        }
        match &**self {
            Term::Free(_) | Term::Bound(_) => self.clone(),
            Term::Lam(h, b) => Arc::new(Term::Lam(h.clone(), b.unfold())),
            Term::App(f, a) => Arc::new(Term::App(f.unfold(), a.unfold())),
            Term::ESub(b, _, a) => b.unfold().instantiate(&a.unfold()),
        }
    }

    /// Number of constructors, saturating at `cap`.
    pub fn node_count(&self, cap: usize) -> usize {
        fn go(t: &Term, n: &mut usize, cap: usize) {
            if *n >= cap {
                return;
            }
            *n += 1;
            match t {
                Term::Free(_) | Term::Bound(_) => {}
                Term::Lam(_, b) => go(b, n, cap),
                Term::App(f, a) | Term::ESub(f, _, a) => {
                    go(f, n, cap);
                    go(a, n, cap);
                }
            }
        }
        let mut n = 0;
        go(self, &mut n, cap);
        n
    }
}

// ---------------------------------------------------------------------------
// Sizes and predicates

impl Term {
    /// Head, LO (also used by mx) or linear head size.
    pub fn size(&self, sys: System) -> Result<usize, Error> {
        if sys != System::Lsc && !self.is_pure() {
            return Err(Error::NonPureTerm(self.to_string()));
        }
        Ok(match sys {
            System::Hd => self.hd_size(),
            System::Lo | System::Mx => self.lo_size(),
            System::Lsc => self.lsc_size(),
        })
    }

    fn hd_size(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 0,
            Term::Lam(_, b) => b.hd_size() + 1,
            Term::App(f, _) => f.hd_size() + 1,
            Term::ESub(..) => unreachable!("pure term expected"),
        }
    }

    pub(crate) fn lo_size(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 0,
            Term::Lam(_, b) => b.lo_size() + 1,
            Term::App(f, a) => f.lo_size() + a.lo_size() + 1,
            Term::ESub(..) => unreachable!("pure term expected"),
        }
    }

    fn lsc_size(&self) -> usize {
        match self {
            Term::Free(_) | Term::Bound(_) => 1,
            Term::Lam(_, b) => b.lsc_size() + 1,
            Term::App(f, _) => f.lsc_size() + 1,
            Term::ESub(b, _, _) => b.lsc_size(),
        }
    }

    pub fn classify(&self, sys: System) -> Result<Classification, Error> {
        if sys != System::Lsc && !self.is_pure() {
            return Err(Error::NonPureTerm(self.to_string()));
        }
        Ok(match sys {
            System::Hd => {
                let neutral = hd_neutral(self);
                Classification { normal: neutral || hd_normal(self), neutral, abs: self.is_lam() }
            }
            System::Lo | System::Mx => {
                let neutral = lo_neutral(self);
                Classification { normal: neutral || lo_normal(self), neutral, abs: self.is_lam() }
            }
            System::Lsc => {
                let neutral = lh_neutral_var(self).is_some();
                let normal = lh_normal_var(self).is_some() || lh_normal_close(self);
                Classification { normal, neutral, abs: abs_lh(self) }
            }
        })
    }

    pub fn is_lam(&self) -> bool {
        matches!(self, Term::Lam(..))
    }
}

pub(crate) fn hd_neutral(t: &Term) -> bool {
    match t {
        Term::Free(_) | Term::Bound(_) => true,
        Term::App(f, _) => hd_neutral(f),
        _ => false,
    }
}

pub(crate) fn hd_normal(t: &Term) -> bool {
    match t {
        Term::Lam(_, b) => hd_normal(b),
        _ => hd_neutral(t),
    }
}

pub(crate) fn lo_neutral(t: &Term) -> bool {
    match t {
        Term::Free(_) | Term::Bound(_) => true,
        Term::App(f, a) => lo_neutral(f) && lo_normal(a),
        _ => false,
    }
}

pub(crate) fn lo_normal(t: &Term) -> bool {
    match t {
        Term::Lam(_, b) => lo_normal(b),
        _ => lo_neutral(t),
    }
}

pub(crate) fn abs_lh(t: &Term) -> bool {
    match t {
        Term::Lam(..) => true,
        Term::ESub(b, _, _) => abs_lh(b),
        _ => false,
    }
}

/// A variable seen from the root of some subterm: a name, or an index that
/// escapes that subterm (normalised to be relative to it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum HeadVar {
    Name(Name),
    Loose(usize),
}

impl HeadVar {
    fn of(t: &Term) -> Option<HeadVar> {
        match t {
            Term::Free(n) => Some(HeadVar::Name(n.clone())),
            Term::Bound(i) => Some(HeadVar::Loose(*i)),
            _ => None,
        }
    }

    /// Seen from outside one binder; `None` if that binder binds it.
    fn unbind(self) -> Option<HeadVar> {
        match self {
            HeadVar::Loose(0) => None,
            HeadVar::Loose(i) => Some(HeadVar::Loose(i - 1)),
            v => Some(v),
        }
    }
}

/// `lhneutral_x(t)`, returning `x`.
pub(crate) fn lh_neutral_var(t: &Term) -> Option<HeadVar> {
    match t {
        Term::Free(_) | Term::Bound(_) => HeadVar::of(t),
        Term::App(f, _) => lh_neutral_var(f),
        Term::ESub(b, _, _) => lh_neutral_var(b)?.unbind(),
        Term::Lam(..) => None,
    }
}

/// `lhnormal_x(t)`, returning `x`.
pub(crate) fn lh_normal_var(t: &Term) -> Option<HeadVar> {
    match t {
        Term::Lam(_, b) => lh_normal_var(b)?.unbind(),
        Term::ESub(b, _, _) => lh_normal_var(b)?.unbind(),
        _ => lh_neutral_var(t),
    }
}

pub(crate) fn lh_normal_close(t: &Term) -> bool {
    match t {
        Term::Lam(_, b) => lh_normal_var(b) == Some(HeadVar::Loose(0)) || lh_normal_close(b),
        Term::ESub(b, _, _) => lh_normal_close(b),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Positions

/// One step from a term to an immediate subterm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Dir {
    /// Body of a λ.
    Body,
    /// Function part of an application.
    Fun,
    /// Argument of an application.
    Arg,
    /// Body of an explicit substitution.
    EsBody,
    /// Substituted term of an explicit substitution.
    EsArg,
}

impl Dir {
    fn code(self) -> char {
        match self {
            Dir::Body => 'b',
            Dir::Fun => 'f',
            Dir::Arg => 'a',
            Dir::EsBody => 's',
            Dir::EsArg => 'e',
        }
    }
}

pub type Path = Vec<Dir>;

pub fn path_string(p: &[Dir]) -> String {
    if p.is_empty() {
        "ε".to_string()
    } else {
        p.iter().map(|d| d.code()).collect()
    }
}

impl Term {
    /// The subterm at `path` (indices stay relative to that position).
    pub fn at(&self, path: &[Dir]) -> Option<&Term> {
        let Some((d, rest)) = path.split_first() else { return Some(self) };
        match (d, self) {
            (Dir::Body, Term::Lam(_, b)) | (Dir::EsBody, Term::ESub(b, _, _)) => b.at(rest),
            (Dir::Fun, Term::App(f, _)) => f.at(rest),
            (Dir::Arg, Term::App(_, a)) | (Dir::EsArg, Term::ESub(_, _, a)) => a.at(rest),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    Fun,
    Arg,
    EsBody,
}

/// Picks a printing name for a binder: the hint, primed until it clashes
/// with nothing the body refers to.
fn binder_name(hint: &str, body: &Term, scope: &[Name]) -> Name {
    let mut n = if hint.is_empty() { "x".to_string() } else { hint.to_string() };
    while clashes(body, &n, scope, 0) {
        n.push('\'');
    }
    Arc::from(n.as_str())
}

fn clashes(t: &Term, n: &str, scope: &[Name], depth: usize) -> bool {
    match t {
        Term::Free(m) => &**m == n,
        Term::Bound(i) => {
            *i > depth
                && scope
                    .len()
                    .checked_sub(i - depth)
                    .is_some_and(|k| &*scope[k] == n)
        }
        Term::Lam(_, b) => clashes(b, n, scope, depth + 1),
        Term::App(f, a) => clashes(f, n, scope, depth) || clashes(a, n, scope, depth),
        Term::ESub(b, _, a) => clashes(b, n, scope, depth + 1) || clashes(a, n, scope, depth),
    }
}

fn write_term(t: &Term, scope: &mut Vec<Name>, slot: Slot, out: &mut String) {
    match t {
        Term::Free(n) => out.push_str(n),
        Term::Bound(i) => match scope.len().checked_sub(i + 1) {
            Some(k) => out.push_str(&scope[k]),
            None => out.push_str(&format!("#{}", i - scope.len())),
        },
        Term::Lam(h, b) => {
            let paren = slot != Slot::Top;
            if paren {
                out.push('(');
            }
            let n = binder_name(h, b, scope);
            out.push('\\');
            out.push_str(&n);
            out.push_str(". ");
            scope.push(n);
            write_term(b, scope, Slot::Top, out);
            scope.pop();
            if paren {
                out.push(')');
            }
        }
        Term::App(f, a) => {
            let paren = matches!(slot, Slot::Arg | Slot::EsBody);
            if paren {
                out.push('(');
            }
            write_term(f, scope, Slot::Fun, out);
            out.push(' ');
            write_term(a, scope, Slot::Arg, out);
            if paren {
                out.push(')');
            }
        }
        Term::ESub(b, h, a) => {
            let n = binder_name(h, b, scope);
            scope.push(n.clone());
            write_term(b, scope, Slot::EsBody, out);
            scope.pop();
            out.push('[');
            out.push_str(&n);
            out.push_str(" := ");
            write_term(a, scope, Slot::Top, out);
            out.push(']');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_term(self, &mut Vec::new(), Slot::Top, &mut out);
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { chars: src.chars().collect(), pos: 0, src }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let consumed: String = self.chars[..self.pos.min(self.chars.len())].iter().collect();
        let line = consumed.matches('\n').count() + 1;
        let col = consumed.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        let _ = self.src;
        ParseError { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(d) if d == c => {
                self.pos += 1;
                Ok(())
            }
            Some(d) => Err(self.error(format!("expected `{c}`, found `{d}`"))),
            None => Err(self.error(format!("expected `{c}`, found end of input"))),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos];
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                Ok(self.chars[start..self.pos].iter().collect())
            }
            Some(c) => Err(self.error(format!("expected identifier, found `{c}`"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    fn at_lambda(&mut self) -> bool {
        matches!(self.peek(), Some('\\') | Some('λ'))
    }

    fn at_atom_start(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '(')
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if self.at_lambda() {
            return self.lambda();
        }
        let mut t = self.atom()?;
        loop {
            if self.at_atom_start() {
                let a = self.atom()?;
                t = Term::app(t, a);
            } else if self.at_lambda() {
                // a trailing abstraction extends as far as possible
                let a = self.lambda()?;
                return Ok(Term::app(t, a));
            } else {
                return Ok(t);
            }
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.pos += 1;
        let x = self.ident()?;
        self.expect('.')?;
        let body = self.term()?;
        Ok(Term::lam(&x, body))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let mut t = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(')')?;
                t
            }
            _ => Term::var(&self.ident()?),
        };
        while self.peek() == Some('[') {
            self.pos += 1;
            let x = self.ident()?;
            self.expect(':')?;
            if self.chars.get(self.pos) != Some(&'=') {
                return Err(self.error("expected `:=`"));
            }
            self.pos += 1;
            let u = self.term()?;
            self.expect(']')?;
            t = Term::esub(t, &x, u);
        }
        Ok(t)
    }
}

/// Parses the surface syntax; unbound names become free variables.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    if p.peek().is_none() {
        return Err(p.error("empty term"));
    }
    let t = p.term()?;
    match p.peek() {
        None => Ok(t),
        Some(c) => Err(p.error(format!("unexpected `{c}`"))),
    }
}

impl FromStr for Term {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}
