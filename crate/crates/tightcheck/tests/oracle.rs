//! Worked examples, through the public API.

use tightcheck::derivation::{check, infer_indices};
use tightcheck::format::{from_json, to_json};
use tightcheck::synthesis::{
    anti_substitute, check_unfolding, head_iso, mts_type_normal_form, subject_expand, subject_reduce,
    substitute_derivation, synthesize_tight, to_hd, to_lsc, type_normal_form, DerivPool,
};
use tightcheck::types::{occurs, AnyType};
use tightcheck::{evaluate, parse, step, CheckErrorKind, Context, Error, MultiSet, Polarity, StepKind, System, Term, Type};

const T0: &str = r"(\x1. (\x0. x0 x1) x1) (\z. z)";
const OMEGA: &str = r"(\x. x x) (\x. x x)";

fn p(s: &str) -> Term {
    parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn t0() -> Term {
    p(T0)
}

/// A one-node derivation file.
fn leaf(sys: &str, rule: &str, term: &str, ctx: &str, ty: &str, idx: &str) -> String {
    format!(
        r#"{{"system":"{sys}","node":{{"rule":"{rule}","term":"{}","context":"{ctx}","type":"{ty}","indices":{idx},"premises":[]}}}}"#,
        term.replace('\\', "\\\\")
    )
}

fn ax(sys: &str, x: &str, ty: &str) -> tightcheck::Derivation {
    let idx = if sys == "lsc" { "[0,0,1]" } else { "[0,0]" };
    from_json(&leaf(sys, "ax", x, &format!("{x} : [{ty}]"), ty, idx)).unwrap()
}

// --- terms ---

#[test]
fn parse_and_render() {
    assert_eq!(p(r"\x. x").to_string(), r"\x. x");
    assert_eq!(p("x (y z)").to_string(), "x (y z)");
    assert_eq!(p("x[x := y]"), Term::esub(Term::var("x"), "x", Term::var("y")));
    assert_eq!(p("x[x := y][y := z]"), Term::esub(Term::esub(Term::var("x"), "x", Term::var("y")), "y", Term::var("z")));
    assert_eq!(p(&t0().to_string()), t0());
    assert_eq!(p(r"\a. a"), p(r"\b. b"));
}

#[test]
fn free_variables() {
    let fv = |s: &str| p(s).free_vars().iter().map(|n| n.to_string()).collect::<Vec<_>>();
    assert_eq!(fv(r"\x. x y"), ["y"]);
    assert_eq!(fv("x[x := y]"), ["y"]);
    assert!(fv(T0).is_empty());
}

#[test]
fn substitution() {
    assert_eq!(p("x x").substitute("x", &p(r"\z. z")), p(r"(\z. z) (\z. z)"));
    let captured = p(r"\y. x").substitute("x", &p("y"));
    assert_eq!(captured, p(r"\w. y"));
    assert!(captured.has_free("y"));
    assert_eq!(p("y").substitute("x", &p(OMEGA)), p("y"));
}

#[test]
fn unfolding() {
    let u = |s: &str| std::sync::Arc::new(p(s)).unfold().as_ref().clone();
    assert_eq!(u("x[x := y][y := z]"), p("z"));
    assert_eq!(u(r"\x. x"), p(r"\x. x"));
    assert_eq!(u(r"(x x)[x := \z. z]"), p(r"(\z. z) (\z. z)"));
}

#[test]
fn sizes() {
    assert_eq!(p(r"\z. z").size(System::Hd).unwrap(), 1);
    assert_eq!(p(r"\z. z").size(System::Lsc).unwrap(), 2);
    assert_eq!(p("x (y z)").size(System::Hd).unwrap(), 1);
    assert_eq!(p("x (y z)").size(System::Lo).unwrap(), 2);
    assert!(matches!(p("x[x := y]").size(System::Hd), Err(Error::NonPureTerm(_))));
}

#[test]
fn classification() {
    let x_omega = p(&format!("x ({OMEGA})"));
    let c = x_omega.classify(System::Hd).unwrap();
    assert!(c.normal && c.neutral && !c.abs);
    assert!(!x_omega.classify(System::Lo).unwrap().normal);

    let c = p(r"(\x. x)[y := z]").classify(System::Lsc).unwrap();
    assert!(c.abs && c.normal && !c.neutral);

    // a linear head normal form: the head variable is not substituted
    let c = p(r"(y x)[x := z] ((\z. z) (\z. z))").classify(System::Lsc).unwrap();
    assert!(c.normal && c.neutral && !c.abs);
}

// --- strategies ---

#[test]
fn single_steps() {
    let s = step(System::Hd, &t0()).unwrap().unwrap();
    assert_eq!(s.result, p(r"(\x0. x0 (\z. z)) (\z. z)"));
    assert_eq!(s.kind, StepKind::Beta);

    let s = step(System::Mx, &p(r"(\x. y) ((\z. z) (\z. z))")).unwrap().unwrap();
    assert_eq!(s.kind, StepKind::MxNonErasing);
    assert_eq!(s.result, p(r"(\x. y) (\z. z)"));

    let s = step(System::Lsc, &t0()).unwrap().unwrap();
    assert_eq!(s.kind, StepKind::LscMultiplicative);
    assert_eq!(s.result, p(r"((\x0. x0 x1) x1)[x1 := \z. z]"));

    assert!(step(System::Hd, &p(r"\z. z")).unwrap().is_none());
    assert!(step(System::Lo, &p("x[x := y]")).is_err());
}

#[test]
fn evaluation() {
    let tr = evaluate(System::Hd, &t0(), 100).unwrap();
    assert_eq!((tr.totals.k, tr.final_term.clone()), (3, p(r"\z. z")));
    assert!(tr.reached_normal);

    let tr = evaluate(System::Lsc, &t0(), 100).unwrap();
    assert_eq!((tr.totals.k, tr.totals.k_m, tr.totals.k_e), (7, 3, 4));
    assert_eq!(tr.final_term, p(r"(\z. z)[x3 := x1][x0 := x1][x1 := \z. z]"));

    let tr = evaluate(System::Hd, &p(OMEGA), 50).unwrap();
    assert!(!tr.reached_normal);
    assert_eq!(tr.totals.k, 50);

    let tr = evaluate(System::Mx, &p(r"(\x. y) ((\z. z) (\z. z))"), 100).unwrap();
    assert_eq!((tr.totals.k, tr.totals.e_total, tr.final_term), (2, 1, p("y")));
    assert_eq!(tr.steps[1].kind, StepKind::MxErasing { erased_size: 1 });
}

// --- types ---

#[test]
fn multisets_and_contexts() {
    let ctx = |s: &str| s.parse::<Context>().unwrap();
    assert_eq!(ctx("x : [N]").union(&ctx("x : [A]")), ctx("x : [N, A]"));
    assert_eq!(ctx("x : [N]").union(&Context::empty()), ctx("x : [N]"));
    assert_eq!(ctx("x : [a0]").union(&ctx("y : [a1]")), ctx("x : [a0]; y : [a1]"));
    assert_eq!(ctx("x : [N]; y : [A]").restrict("x"), ctx("y : [A]"));
    assert_eq!(Context::empty().restrict("x"), Context::empty());
    assert_eq!(ctx("x : [N, N]").restrict("y"), ctx("x : [N, N]"));

    let ms = |s: &str| s.parse::<MultiSet>().unwrap();
    let ty = |s: &str| s.parse::<Type>().unwrap();
    assert!(ms("[N, A]").is_tight());
    assert!(!ty("[N] -> N").is_tight());
    assert!(ctx("y : [N]").is_tight());
    assert_eq!(ty("N").size(), 0);
    assert_eq!(ty("[A] -> A").size(), 1);
    assert_eq!(ms("[[A] -> A, A]").size(), 1);
}

#[test]
fn polarities() {
    let m = |s: &str| AnyType::Multi(s.parse().unwrap());
    let t = |s: &str| AnyType::Type(s.parse().unwrap());
    assert!(occurs(&m("[]"), Polarity::Pos, &m("[]")));
    assert!(occurs(&m("[]"), Polarity::Neg, &t("[] -> a0")));
    assert!(!occurs(&m("[]"), Polarity::Pos, &t("[a0] -> a0")));
}

// --- derivations ---

fn hd_t0() -> tightcheck::Derivation {
    from_json(include_str!("../corpus/hd_t0.json")).unwrap()
}

fn lsc_t0() -> tightcheck::Derivation {
    from_json(include_str!("../corpus/lsc_t0.json")).unwrap()
}

#[test]
fn corpus_derivations() {
    let hd = hd_t0();
    let j = check(&hd).unwrap();
    assert_eq!(j.subject, t0());
    assert_eq!((j.indices.b, j.indices.r), (6, 1));
    assert_eq!(hd.size(), 7);
    assert!(hd.flags().tight);

    let lsc = lsc_t0();
    let j = check(&lsc).unwrap();
    assert_eq!((j.indices.b, j.indices.e, j.indices.r), (6, 4, 2));
    assert_eq!(lsc.size(), 12);
    assert!(lsc.flags().tight);

    // the golden files are exactly what synthesis produces, byte for byte
    assert_eq!(to_json(&synthesize_tight(System::Hd, &t0(), 100).unwrap().1), include_str!("../corpus/hd_t0.json"));
    assert_eq!(to_json(&synthesize_tight(System::Lsc, &t0(), 100).unwrap().1), include_str!("../corpus/lsc_t0.json"));
}

#[test]
fn checker_rejects_bad_indices() {
    let bad = from_json(&leaf("hd", "ax", "x", "x : [N]", "N", "[1,0]")).unwrap();
    let e = check(&bad).unwrap_err();
    assert_eq!(e.kind, CheckErrorKind::IndexMismatch);
    assert!(e.path.is_empty());
}

#[test]
fn index_inference() {
    let d = infer_indices(&ax("hd", "x", "a0")).unwrap();
    assert_eq!((d.indices().b, d.indices().r), (0, 0));
    assert_eq!(d.size(), 0);

    let f = ax("lsc", "z", "A");
    let funb = tightcheck::Derivation {
        rule: tightcheck::Rule::FunB,
        premises: vec![f],
        judgement: tightcheck::Judgement {
            system: System::Lsc,
            context: Context::empty(),
            subject: p(r"\z. z"),
            conclusion: tightcheck::Conclusion::Type("[A] -> A".parse().unwrap()),
            indices: Default::default(),
        },
    };
    let d = infer_indices(&funb).unwrap();
    assert_eq!(d.indices().show(System::Lsc), "(1,1,0)");

    let d = type_normal_form(System::Lo, &p(r"\z. z")).unwrap();
    assert_eq!(d.indices().show(System::Lo), "(0,1)");
}

#[test]
fn derivation_flags() {
    let a = ax("hd", "x", "a0");
    let f = a.flags();
    assert!(!f.tight && f.traditional && f.shrinking);

    let d = mts_type_normal_form(&p("x y"), Some("a0".parse().unwrap())).unwrap();
    assert!(d.flags().shrinking);
    let not_shrinking = leaf("lo", "ax", "x", "x : [[] -> a0]", "[] -> a0", "[0,0]");
    let d = from_json(&not_shrinking).unwrap();
    check(&d).unwrap();
    // the context mentions [] negatively; the type positively
    assert!(!d.flags().shrinking);
}

// --- synthesis ---

#[test]
fn normal_form_typings() {
    let d = type_normal_form(System::Hd, &p(r"\z. z")).unwrap();
    assert_eq!((d.indices().show(System::Hd), d.conclusion().as_type().cloned()), ("(0,1)".into(), Some(Type::Abs)));

    let d = type_normal_form(System::Lo, &p(r"x (\y. y)")).unwrap();
    assert_eq!(d.indices().show(System::Lo), "(0,2)");
    assert_eq!(d.context(), &"x : [N]".parse::<Context>().unwrap());
    assert_eq!(d.conclusion().as_type(), Some(&Type::Neutral));

    let d = type_normal_form(System::Lsc, &p(r"\z. z")).unwrap();
    assert_eq!(d.indices().show(System::Lsc), "(0,0,2)");
}

#[test]
fn leaf_substitution_and_back() {
    let pool = DerivPool { subject: p("y"), members: vec![ax("hd", "y", "a0")] };
    let d = substitute_derivation(System::Hd, &ax("hd", "x", "a0"), "x", &pool).unwrap();
    assert_eq!(d, ax("hd", "y", "a0"));

    let (phi_u, pool) = anti_substitute(System::Hd, &d, &p("x"), "x", &p("y")).unwrap();
    assert_eq!(phi_u, ax("hd", "x", "a0"));
    assert_eq!(pool.types(), "[a0]".parse().unwrap());

    // an untyped argument
    let phi = type_normal_form(System::Lo, &p(r"\y. y")).unwrap();
    let (phi_u, pool) = anti_substitute(System::Lo, &phi, &p(r"\y. y"), "x", &p(OMEGA)).unwrap();
    assert_eq!(phi_u, phi);
    assert!(pool.members.is_empty());

    let empty = DerivPool { subject: p(OMEGA), members: vec![] };
    assert_eq!(substitute_derivation(System::Lo, &phi, "x", &empty).unwrap(), phi);
}

#[test]
fn t0_first_step_decomposes() {
    let hd = hd_t0();
    let s = step(System::Hd, &t0()).unwrap().unwrap();
    let red = subject_reduce(&hd, &s).unwrap();
    assert_eq!(red.indices().show(System::Hd), "(4,1)");
    check(&red).unwrap();

    let body = p(r"(\x0. x0 x1) x1");
    let (phi_u, pool) = anti_substitute(System::Hd, &red, &body, "x1", &p(r"\z. z")).unwrap();
    assert_eq!(pool.types(), "[A, [A] -> A]".parse().unwrap());
    assert_eq!(pool.members.len(), 2);
    let back = substitute_derivation(System::Hd, &phi_u, "x1", &pool).unwrap();
    assert_eq!(back, red);

    assert_eq!(subject_expand(&red, &s).unwrap(), hd);
}

#[test]
fn reduction_preserves_or_decrements() {
    // a traditional LO typing ignoring the argument
    let t = p(r"x ((\z. z) y)");
    let d = from_json(
        r#"{"system":"lo","node":{"rule":"app_b","term":"x ((\\z. z) y)","context":"x : [[] -> a0]","type":"a0","indices":[1,0],"premises":[
        {"rule":"ax","term":"x","context":"x : [[] -> a0]","type":"[] -> a0","indices":[0,0],"premises":[]},
        {"rule":"many","term":"(\\z. z) y","context":"","multiset":"[]","indices":[0,0],"premises":[]}]}}"#,
    )
    .unwrap();
    check(&d).unwrap();
    let s = step(System::Lo, &t).unwrap().unwrap();
    let d2 = subject_reduce(&d, &s).unwrap();
    assert_eq!(d2.indices(), d.indices());
    assert_eq!(d2.subject(), &p("x y"));

    let t = p(r"x[x := \z. z]");
    let (tr, d) = synthesize_tight(System::Lsc, &t, 10).unwrap();
    let d2 = subject_reduce(&d, &tr.steps[0]).unwrap();
    assert_eq!(d.indices().e, d2.indices().e + 1);
    check(&d2).unwrap();
}

#[test]
fn expansion_sequences() {
    let tr = evaluate(System::Hd, &t0(), 100).unwrap();
    let mut d = type_normal_form(System::Hd, &tr.final_term).unwrap();
    let mut seen = vec![d.indices().show(System::Hd)];
    for s in tr.steps.iter().rev() {
        d = subject_expand(&d, s).unwrap();
        seen.push(d.indices().show(System::Hd));
    }
    assert_eq!(seen, ["(0,1)", "(2,1)", "(4,1)", "(6,1)"]);

    let (_, d) = synthesize_tight(System::Lsc, &t0(), 100).unwrap();
    assert_eq!(d.indices().show(System::Lsc), "(6,4,2)");

    let t = p(r"(\x. y) (\z. z)");
    let s = step(System::Mx, &t).unwrap().unwrap();
    let d = type_normal_form(System::Mx, &p("y")).unwrap();
    assert_eq!(d.indices().show(System::Mx), "(0,0)");
    let up = subject_expand(&d, &s).unwrap();
    assert_eq!(up.indices().show(System::Mx), "(2,1)");
    check(&up).unwrap();
}

#[test]
fn tight_synthesis() {
    let (_, d) = synthesize_tight(System::Mx, &p(r"(\x. y) ((\z. z) (\z. z))"), 100).unwrap();
    assert_eq!(d.indices().show(System::Mx), "(4,1)");
    assert!(d.flags().mx_tight);
    assert!(matches!(synthesize_tight(System::Hd, &p(OMEGA), 20), Err(Error::FuelExhausted(20))));
}

#[test]
fn traditional_normal_typings() {
    let d = mts_type_normal_form(&p("x"), Some(Type::Atom(0))).unwrap();
    assert_eq!(d.context(), &"x : [a0]".parse::<Context>().unwrap());
    assert_eq!(d.indices().show(System::Lo), "(0,0)");

    let d = mts_type_normal_form(&p(r"\z. z"), None).unwrap();
    assert_eq!(d.conclusion().as_type(), Some(&"[a0] -> a0".parse().unwrap()));
    assert_eq!((d.indices().b, d.type_size()), (1, 1));

    let d = mts_type_normal_form(&p("x y"), Some(Type::Atom(0))).unwrap();
    assert_eq!(d.context(), &"x : [[a1] -> a0]; y : [a1]".parse::<Context>().unwrap());
    assert_eq!((d.indices().b, d.type_size()), (1, 1));
    check(&d).unwrap();

    assert!(matches!(mts_type_normal_form(&p(r"(\x. x) y"), None), Err(Error::NotNormal(_))));
}

#[test]
fn head_isomorphism() {
    let hd = hd_t0();
    let lsc = to_lsc(&hd).unwrap();
    assert_eq!(lsc, lsc_t0());
    assert_eq!(to_hd(&lsc).unwrap(), hd);
    assert_eq!(head_iso(&hd).unwrap(), lsc);

    let a = ax("hd", "x", "a0");
    assert_eq!(to_lsc(&a).unwrap().indices().show(System::Lsc), "(0,0,1)");
    assert_eq!(to_hd(&head_iso(&a).unwrap()).unwrap(), a);

    let i = type_normal_form(System::Hd, &p(r"\z. z")).unwrap();
    assert_eq!(to_lsc(&i).unwrap().indices().show(System::Lsc), "(0,0,2)");
}

#[test]
fn unfolding_derivations() {
    assert_eq!(check_unfolding(&lsc_t0().clone()).unwrap(), hd_t0());

    let d = from_json(
        r#"{"system":"lsc","node":{"rule":"es","term":"x[x := y]","context":"y : [a0]","type":"a0","indices":[0,1,1],"premises":[
        {"rule":"ax","term":"x","context":"x : [a0]","type":"a0","indices":[0,0,1],"premises":[]},
        {"rule":"many","term":"y","context":"y : [a0]","multiset":"[a0]","indices":[0,0,1],"premises":[
          {"rule":"ax","term":"y","context":"y : [a0]","type":"a0","indices":[0,0,1],"premises":[]}]}]}}"#,
    );
    let d = match d {
        Ok(d) => infer_indices(&d).unwrap(),
        Err(e) => panic!("{e}"),
    };
    assert_eq!(d.indices().show(System::Lsc), "(0,1,1)");
    let n = check_unfolding(&d).unwrap();
    assert_eq!(n, ax("hd", "y", "a0"));

    // the normal form reached by the linear head trace
    let (tr, _) = synthesize_tight(System::Lsc, &t0(), 100).unwrap();
    let nf = type_normal_form(System::Lsc, &tr.final_term).unwrap();
    let n = check_unfolding(&nf).unwrap();
    assert_eq!(n.subject(), &p(r"\z. z"));
    assert_eq!(n.conclusion(), nf.conclusion());
    assert_eq!(n.context(), nf.context());
}

#[test]
fn multiset_helpers() {
    assert!(MultiSet::empty().is_tight());
    assert_eq!(MultiSet::single(Type::Neutral).len(), 1);
}
