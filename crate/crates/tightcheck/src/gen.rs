//! Random terms, types and derivations, plus the `t_n` family.
//!
//! Everything is driven by a caller-supplied RNG, so a fixed seed gives a
//! fixed stream.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::derivation::{fresh_for, Derivation, Rule};
use crate::error::Error;
use crate::surgery::{rebuild, tnf_sk, Sk};
use crate::term::{lo_normal, Name, System, Term};
use crate::types::{MultiSet, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Arbitrary,
    SimplyTyped,
}

fn name(prefix: &str, i: usize) -> Name {
    Arc::from(format!("{prefix}{i}").as_str())
}

fn lam(depth: usize, body: Term) -> Term {
    Term::Lam(name("x", depth), Arc::new(body))
}

fn app(f: Term, a: Term) -> Term {
    Term::App(Arc::new(f), Arc::new(a))
}

/// Abstracts the free variables of `t`, innermost first in name order.
fn close(t: Term) -> Term {
    let frees: Vec<Name> = t.free_vars().into_iter().collect();
    frees.iter().rev().fold(t, |acc, x| Term::lam(x, acc))
}

/// A closed pure term with at most `max_size` constructors (at least one
/// abstraction).
pub fn arbitrary<R: Rng>(rng: &mut R, max_size: usize) -> Term {
    let n = rng.gen_range(1..=max_size.max(1));
    close(arb(rng, n, 0, false))
}

/// Like [`arbitrary`], with explicit substitutions and free variables left
/// open.
pub fn arbitrary_lsc<R: Rng>(rng: &mut R, max_size: usize) -> Term {
    let n = rng.gen_range(1..=max_size.max(1));
    arb(rng, n, 0, true)
}

fn var<R: Rng>(rng: &mut R, depth: usize) -> Term {
    if depth > 0 && rng.gen_bool(0.8) {
        Term::Bound(rng.gen_range(0..depth))
    } else {
        Term::Free(name("v", rng.gen_range(0..3)))
    }
}

fn arb<R: Rng>(rng: &mut R, n: usize, depth: usize, es: bool) -> Term {
    if n <= 1 {
        return var(rng, depth);
    }
    let roll: f64 = rng.gen();
    if roll < 0.35 {
        lam(depth, arb(rng, n - 1, depth + 1, es))
    } else if es && roll < 0.5 && n >= 3 {
        let k = rng.gen_range(1..n - 1);
        Term::ESub(
            Arc::new(arb(rng, k, depth + 1, es)),
            name("x", depth),
            Arc::new(arb(rng, n - 1 - k, depth, es)),
        )
    } else if n >= 4 && roll < 0.7 {
        // a β-redex
        let k = rng.gen_range(1..n - 2);
        app(lam(depth, arb(rng, k, depth + 1, es)), arb(rng, n - 2 - k, depth, es))
    } else if n >= 3 {
        let k = rng.gen_range(1..n - 1);
        app(arb(rng, k, depth, es), arb(rng, n - 1 - k, depth, es))
    } else {
        var(rng, depth)
    }
}

/// Simple types over one base type.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Simple {
    O,
    Arr(Box<Simple>, Box<Simple>),
}

fn simple<R: Rng>(rng: &mut R, depth: usize) -> Simple {
    if depth == 0 || rng.gen_bool(0.5) {
        Simple::O
    } else {
        Simple::Arr(Box::new(simple(rng, depth - 1)), Box::new(simple(rng, depth - 1)))
    }
}

/// A pure term typable with simple types, hence strongly normalising.
/// Free variables may remain.
pub fn simply_typed<R: Rng>(rng: &mut R, max_size: usize) -> Term {
    let ty = simple(rng, 2);
    let mut budget = max_size.max(1) as isize;
    typed(rng, &ty, &mut Vec::new(), &mut budget)
}

/// Arguments `x` needs to reach `goal`, if its type ends there.
fn spine(t: &Simple, goal: &Simple) -> Option<Vec<Simple>> {
    if t == goal {
        return Some(vec![]);
    }
    match t {
        Simple::Arr(a, b) => spine(b, goal).map(|mut v| {
            v.insert(0, (**a).clone());
            v
        }),
        Simple::O => None,
    }
}

fn typed<R: Rng>(rng: &mut R, ty: &Simple, ctx: &mut Vec<Simple>, budget: &mut isize) -> Term {
    *budget -= 1;
    let heads: Vec<(usize, Vec<Simple>)> = ctx
        .iter()
        .rev()
        .enumerate()
        .filter_map(|(i, t)| spine(t, ty).map(|s| (i, s)))
        .collect();
    let roll: f64 = rng.gen();
    if let Simple::Arr(a, b) = ty {
        if *budget <= 0 || roll < 0.4 {
            ctx.push((**a).clone());
            let body = typed(rng, b, ctx, budget);
            ctx.pop();
            return lam(ctx.len(), body);
        }
    }
    if *budget > 2 && roll < 0.65 {
        let a = simple(rng, 1);
        ctx.push(a.clone());
        let body = typed(rng, ty, ctx, budget);
        ctx.pop();
        let arg = typed(rng, &a, ctx, budget);
        return app(lam(ctx.len(), body), arg);
    }
    let short: Vec<_> = heads.iter().filter(|(_, s)| *budget > 0 || s.is_empty()).collect();
    match short.choose(rng) {
        Some((i, args)) => {
            let mut t = Term::Bound(*i);
            for a in args.clone() {
                t = app(t, typed(rng, &a, ctx, budget));
            }
            t
        }
        // a free variable of exactly this type
        None => Term::Free(name("c", rng.gen_range(0..2))),
    }
}

/// A random LO normal form (free variables allowed).
pub fn lo_normal_form<R: Rng>(rng: &mut R, max_size: usize) -> Term {
    let mut budget = rng.gen_range(0..=max_size) as isize;
    normal(rng, 0, &mut budget)
}

fn normal<R: Rng>(rng: &mut R, depth: usize, budget: &mut isize) -> Term {
    if *budget > 0 && rng.gen_bool(0.3) {
        *budget -= 1;
        lam(depth, normal(rng, depth + 1, budget))
    } else {
        neutral(rng, depth, budget)
    }
}

fn neutral<R: Rng>(rng: &mut R, depth: usize, budget: &mut isize) -> Term {
    let mut t = var(rng, depth);
    while *budget > 0 && rng.gen_bool(0.5) {
        *budget -= 1;
        t = app(t, normal(rng, depth, budget));
    }
    t
}

/// A small random type mixing atoms, tight constants and arrows.
pub fn small_type<R: Rng>(rng: &mut R, depth: usize) -> Type {
    let roll = rng.gen_range(0..6);
    if depth == 0 || roll < 3 {
        return match roll % 3 {
            0 => Type::Atom(rng.gen_range(0..2)),
            1 => Type::Neutral,
            _ => Type::Abs,
        };
    }
    let m: MultiSet = (0..rng.gen_range(0..3)).map(|_| small_type(rng, depth - 1)).collect();
    Type::arrow(m, small_type(rng, depth - 1))
}

/// `t_n = A_n I` with `A_0 = λx0. x0 x1 … xn` and `A_i = λxi. A_{i-1} xi`;
/// `t_1` is the running example `(λx1.(λx0. x0 x1) x1) I`.
pub fn t_n(n: usize) -> Term {
    let x = |i: usize| Term::var(&format!("x{i}"));
    let mut a = Term::lam("x0", Term::apps(x(0), (1..=n).map(x)));
    for i in 1..=n {
        a = Term::lam(&format!("x{i}"), Term::app(a, x(i)));
    }
    Term::app(a, Term::lam("z", Term::var("z")))
}

/// A random derivation of a normal form (of the given system's
/// predicates), with random non-tight choices wherever the rules allow
/// them. Not every choice of type is tight, and the result always checks.
pub fn random_derivation<R: Rng>(rng: &mut R, sys: System, t: &Term) -> Result<Derivation, Error> {
    let sk = rand_sk(rng, sys, t, None)?;
    rebuild(sys, &sk.0, &Arc::new(t.clone()))
}

/// Shape plus conclusion type. `want` forces the type of a neutral term.
fn rand_sk<R: Rng>(rng: &mut R, sys: System, t: &Term, want: Option<Type>) -> Result<(Sk, Type), Error> {
    if let Term::Lam(h, b) = t {
        let (bsk, _) = rand_sk(rng, sys, &b.open(&fresh_for(h, b)), None)?;
        let d = rebuild(sys, &Sk::node(Rule::FunB, vec![bsk.clone()]), &Arc::new(t.clone()))?;
        let fb = d.conclusion().as_type().cloned().expect("fun_b concludes a type");
        if let Type::Arrow(m, cod) = &fb {
            if m.is_tight() && cod.is_tight() && rng.gen_bool(0.5) {
                return Ok((Sk::node(Rule::FunR, vec![bsk]), Type::Abs));
            }
        }
        return Ok((Sk::node(Rule::FunB, vec![bsk]), fb));
    }
    let mut args = Vec::new();
    let mut head = t;
    while let Term::App(f, a) = head {
        args.push(a.clone());
        head = f;
    }
    args.reverse();
    if !matches!(head, Term::Free(_) | Term::Bound(_)) {
        return Err(Error::NotNormal(t.to_string()));
    }
    // the first k arguments are consumed by arrows, the rest by tight rules
    let k = if args.is_empty() { 0 } else { rng.gen_range(0..=args.len()) };
    let tail_rule = if matches!(sys, System::Hd | System::Lsc) { Rule::AppHd } else { Rule::AppLo };
    let end = if k < args.len() {
        Type::Neutral
    } else {
        want.unwrap_or_else(|| match rng.gen_range(0..3) {
            0 => Type::Neutral,
            1 => Type::Abs,
            _ => Type::Atom(rng.gen_range(0..2)),
        })
    };
    let mut pools = Vec::new();
    for a in &args[..k] {
        let n = match sys {
            System::Mx => rng.gen_range(1..=2),
            _ if lo_normal(a) => rng.gen_range(0..=2),
            _ => 0,
        };
        let mut pool = Vec::new();
        for _ in 0..n {
            pool.push(rand_sk(rng, sys, a, None)?);
        }
        pools.push(pool);
    }
    let head_ty = pools.iter().rev().fold(end, |acc, p| {
        Type::arrow(p.iter().map(|(_, t)| t.clone()).collect(), acc)
    });
    let ty = head_ty.clone();
    let mut sk = Sk::ax(head_ty);
    let mut cur = ty;
    for (i, a) in args.iter().enumerate() {
        if i < k {
            let pool = std::mem::take(&mut pools[i]);
            let many = if sys == System::Mx { Rule::ManyPos } else { Rule::Many };
            sk = Sk::node(Rule::AppB, vec![sk, Sk::many(many, pool.into_iter().map(|(s, _)| s).collect())]);
            cur = match cur {
                Type::Arrow(_, c) => *c,
                _ => unreachable!(),
            };
        } else if tail_rule == Rule::AppHd {
            sk = Sk::node(Rule::AppHd, vec![sk]);
        } else {
            sk = Sk::node(Rule::AppLo, vec![sk, tnf_sk(sys, a)]);
        }
    }
    Ok((sk, cur))
}

/// A derivation of `x p1 … pn`-shaped subjects (under abstractions) that
/// types no argument: the head gets `[] → … → [] → a0`. Works for any
/// arguments, normalising or not.
pub fn lazy_lo_derivation(t: &Term) -> Option<Derivation> {
    fn go(t: &Term) -> Option<Sk> {
        match t {
            Term::Lam(_, b) => Some(Sk::node(Rule::FunB, vec![go(b)?])),
            _ => {
                let mut n = 0;
                let mut head = t;
                while let Term::App(f, _) = head {
                    n += 1;
                    head = f;
                }
                if !matches!(head, Term::Free(_) | Term::Bound(_)) {
                    return None;
                }
                let ty = (0..n).fold(Type::Atom(0), |acc, _| Type::arrow(MultiSet::empty(), acc));
                let mut sk = Sk::ax(ty);
                for _ in 0..n {
                    sk = Sk::node(Rule::AppB, vec![sk, Sk::node(Rule::Many, vec![])]);
                }
                Some(sk)
            }
        }
    }
    rebuild(System::Lo, &go(t)?, &Arc::new(t.clone())).ok()
}
