//! Multi types: tight constants, atoms, arrows with multiset domains, and
//! typing contexts, plus type sizes and polarity occurrences.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::term::Name;

/// Variant order fixes the canonical order used to sort multisets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Neutral,
    Abs,
    Atom(u32),
    Arrow(MultiSet, Box<Type>),
}

/// A finite multiset of types, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiSet(Vec<Type>);

/// Finite-support map from names to non-empty multisets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context(BTreeMap<Name, MultiSet>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    /// `+·+ = +`, `−·+ = −`, `−·− = +`, `+·− = −`.
    pub fn compose(self, other: Polarity) -> Polarity {
        if self == other {
            Polarity::Pos
        } else {
            Polarity::Neg
        }
    }

    fn flip(self) -> Polarity {
        self.compose(Polarity::Neg)
    }
}

/// Either kind of (multi)type, as a search target or container.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyType {
    Type(Type),
    Multi(MultiSet),
}

impl Type {
    pub fn arrow(m: MultiSet, t: Type) -> Type {
        Type::Arrow(m, Box::new(t))
    }

    pub fn is_tight(&self) -> bool {
        matches!(self, Type::Neutral | Type::Abs)
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Arrow(m, t) => m.size() + t.size() + 1,
            _ => 0,
        }
    }

    /// Does a tight constant occur anywhere inside?
    pub fn mentions_tight(&self) -> bool {
        match self {
            Type::Neutral | Type::Abs => true,
            Type::Atom(_) => false,
            Type::Arrow(m, t) => m.mentions_tight() || t.mentions_tight(),
        }
    }

    pub fn max_atom(&self) -> Option<u32> {
        match self {
            Type::Atom(a) => Some(*a),
            Type::Arrow(m, t) => m.iter().filter_map(Type::max_atom).chain(t.max_atom()).max(),
            _ => None,
        }
    }
}

impl MultiSet {
    pub fn new(mut items: Vec<Type>) -> MultiSet {
        items.sort();
        MultiSet(items)
    }

    pub fn empty() -> MultiSet {
        MultiSet(Vec::new())
    }

    pub fn single(t: Type) -> MultiSet {
        MultiSet(vec![t])
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Type> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &MultiSet) -> MultiSet {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        MultiSet::new(v)
    }

    /// Removes one copy of `t`; `false` if absent.
    pub fn remove_one(&mut self, t: &Type) -> bool {
        match self.0.iter().position(|u| u == t) {
            Some(i) => {
                self.0.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn is_tight(&self) -> bool {
        self.0.iter().all(Type::is_tight)
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(Type::size).sum()
    }

    pub fn mentions_tight(&self) -> bool {
        self.0.iter().any(Type::mentions_tight)
    }
}

impl FromIterator<Type> for MultiSet {
    fn from_iter<I: IntoIterator<Item = Type>>(iter: I) -> Self {
        MultiSet::new(iter.into_iter().collect())
    }
}

impl Context {
    pub fn empty() -> Context {
        Context::default()
    }

    pub fn single(x: Name, m: MultiSet) -> Context {
        let mut c = Context::default();
        c.insert(x, m);
        c
    }

    /// `Γ(x)`, with `[]` outside the domain.
    pub fn get(&self, x: &str) -> MultiSet {
        self.0.get(x).cloned().unwrap_or_default()
    }

    fn insert(&mut self, x: Name, m: MultiSet) {
        if !m.is_empty() {
            self.0.insert(x, m);
        }
    }

    pub fn union(&self, other: &Context) -> Context {
        let mut out = self.clone();
        for (x, m) in &other.0 {
            let merged = out.get(x).union(m);
            out.insert(x.clone(), merged);
        }
        out
    }

    /// `Γ \\ x`.
    pub fn restrict(&self, x: &str) -> Context {
        let mut out = self.clone();
        out.0.remove(x);
        out
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &MultiSet)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_tight(&self) -> bool {
        self.0.values().all(MultiSet::is_tight)
    }

    pub fn size(&self) -> usize {
        self.0.values().map(MultiSet::size).sum()
    }

    /// Total number of type occurrences.
    pub fn cardinality(&self) -> usize {
        self.0.values().map(MultiSet::len).sum()
    }

    pub fn mentions_tight(&self) -> bool {
        self.0.values().any(MultiSet::mentions_tight)
    }

    pub fn rename(&self, from: &str, to: &Name) -> Context {
        let mut out = self.clone();
        if let Some(m) = out.0.remove(from) {
            let merged = out.get(to).union(&m);
            out.insert(to.clone(), merged);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Polarity occurrences

/// Is `target` in `pos(container)` (resp. `neg`)?
pub fn occurs_in_type(target: &AnyType, p: Polarity, container: &Type) -> bool {
    if p == Polarity::Pos && *target == AnyType::Type(container.clone()) {
        return true;
    }
    match container {
        Type::Arrow(m, t) => occurs_in_multi(target, p.flip(), m) || occurs_in_type(target, p, t),
        _ => false,
    }
}

pub fn occurs_in_multi(target: &AnyType, p: Polarity, container: &MultiSet) -> bool {
    if p == Polarity::Pos && *target == AnyType::Multi(container.clone()) {
        return true;
    }
    container.iter().any(|s| occurs_in_type(target, p, s))
}

pub fn occurs_in_context(target: &AnyType, p: Polarity, ctx: &Context) -> bool {
    ctx.0.values().any(|m| occurs_in_multi(target, p, m))
}

pub fn occurs(target: &AnyType, p: Polarity, container: &AnyType) -> bool {
    match container {
        AnyType::Type(t) => occurs_in_type(target, p, t),
        AnyType::Multi(m) => occurs_in_multi(target, p, m),
    }
}

/// `[] ∉ neg(Γ)`.
pub fn context_is_shrinking(ctx: &Context) -> bool {
    !occurs_in_context(&AnyType::Multi(MultiSet::empty()), Polarity::Neg, ctx)
}

/// `[] ∉ pos(τ)`.
pub fn type_is_shrinking(t: &Type) -> bool {
    !occurs_in_type(&AnyType::Multi(MultiSet::empty()), Polarity::Pos, t)
}

// ---------------------------------------------------------------------------
// Printing and parsing

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Neutral => f.write_str("N"),
            Type::Abs => f.write_str("A"),
            Type::Atom(a) => write!(f, "a{a}"),
            Type::Arrow(m, t) => write!(f, "{m} -> {t}"),
        }
    }
}

impl fmt::Display for MultiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{x} : {m}")?;
        }
        Ok(())
    }
}

impl fmt::Display for AnyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyType::Type(t) => t.fmt(f),
            AnyType::Multi(m) => m.fmt(f),
        }
    }
}

struct TyParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> TyParser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, Error> {
        Err(Error::InvalidType(format!("{msg} at offset {}", self.pos)))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<(), Error> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected `{}`", c as char))
        }
    }

    fn ty(&mut self) -> Result<Type, Error> {
        match self.peek() {
            Some(b'N') => {
                self.pos += 1;
                Ok(Type::Neutral)
            }
            Some(b'A') => {
                self.pos += 1;
                Ok(Type::Abs)
            }
            Some(b'a') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match digits.parse() {
                    Ok(n) => Ok(Type::Atom(n)),
                    Err(_) => self.err("expected atom number"),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.ty()?;
                self.eat(b')')?;
                Ok(t)
            }
            Some(b'[') => {
                let m = self.multi()?;
                self.eat(b'-')?;
                if self.s.get(self.pos) != Some(&b'>') {
                    return self.err("expected `->`");
                }
                self.pos += 1;
                Ok(Type::arrow(m, self.ty()?))
            }
            _ => self.err("expected a type"),
        }
    }

    fn multi(&mut self) -> Result<MultiSet, Error> {
        self.eat(b'[')?;
        let mut items = Vec::new();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(MultiSet::empty());
        }
        loop {
            items.push(self.ty()?);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b']') => {
                    self.pos += 1;
                    return Ok(MultiSet::new(items));
                }
                _ => return self.err("expected `,` or `]`"),
            }
        }
    }

    fn done(&mut self) -> Result<(), Error> {
        match self.peek() {
            None => Ok(()),
            Some(_) => self.err("trailing input"),
        }
    }
}

impl FromStr for Type {
    type Err = Error;
    fn from_str(s: &str) -> Result<Type, Error> {
        let mut p = TyParser { s: s.as_bytes(), pos: 0 };
        let t = p.ty()?;
        p.done()?;
        Ok(t)
    }
}

impl FromStr for MultiSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<MultiSet, Error> {
        let mut p = TyParser { s: s.as_bytes(), pos: 0 };
        let m = p.multi()?;
        p.done()?;
        Ok(m)
    }
}

impl FromStr for Context {
    type Err = Error;
    /// `x : [t, …]; y : […]`; the empty string is the empty context.
    fn from_str(s: &str) -> Result<Context, Error> {
        let mut ctx = Context::default();
        for entry in s.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (x, m) = entry
                .split_once(':')
                .ok_or_else(|| Error::InvalidType(format!("context entry `{entry}`")))?;
            let x = x.trim();
            let m: MultiSet = m.trim().parse()?;
            let merged = ctx.get(x).union(&m);
            ctx.insert(Name::from(x), merged);
        }
        Ok(ctx)
    }
}
