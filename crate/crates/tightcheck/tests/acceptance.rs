//! One pass/fail line per acceptance criterion.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tightcheck::fuzz::{run_fuzz, FuzzConfig, FuzzReport};
use tightcheck::gen::{arbitrary_lsc, lo_normal_form, random_derivation, small_type, t_n, Generator};
use tightcheck::synthesis::{mts_type_normal_form, synthesize_tight, type_normal_form};
use tightcheck::types::{occurs, AnyType};
use tightcheck::derivation::check;
use tightcheck::{evaluate, parse, step, Polarity, System, Term, Type};

const SEED: u64 = 20_240_611;

struct Line {
    ok: bool,
    detail: String,
    took: Duration,
    budget: Duration,
}

fn t0() -> Term {
    parse(r"(\x1. (\x0. x0 x1) x1) (\z. z)").unwrap()
}

fn criterion1() -> (bool, String) {
    let (tr, d) = synthesize_tight(System::Hd, &t0(), 100).unwrap();
    let i = d.indices();
    let size = tr.final_term.size(System::Hd).unwrap();
    let ok = tr.totals.k == 3
        && tr.final_term == parse(r"\z. z").unwrap()
        && size == 1
        && (i.b, i.r) == (6, 1)
        && d.flags().tight
        && check(&d).is_ok();
    (ok, format!("k={} nf={} size={size} indices={}", tr.totals.k, tr.final_term, i.show(System::Hd)))
}

fn criterion2() -> (bool, String) {
    let (tr, d) = synthesize_tight(System::Lsc, &t0(), 100).unwrap();
    let i = d.indices();
    let size = tr.final_term.size(System::Lsc).unwrap();
    let ok = (tr.totals.k_m, tr.totals.k_e) == (3, 4)
        && size == 2
        && (i.b, i.e, i.r) == (6, 4, 2)
        && d.flags().tight
        && check(&d).is_ok();
    (ok, format!("k_m={} k_e={} size={size} indices={}", tr.totals.k_m, tr.totals.k_e, i.show(System::Lsc)))
}

/// `t_1` is the running example, whose 3 multiplicative steps fix the
/// count at `2n + 1` (see the README).
fn criterion3() -> (bool, String) {
    let mut ok = true;
    let mut ke = Vec::new();
    let mut km = Vec::new();
    for n in 1..=8 {
        let tr = evaluate(System::Lsc, &t_n(n), 100_000).unwrap();
        ok &= tr.reached_normal && tr.totals.k_m == 2 * n + 1;
        km.push(tr.totals.k_m);
        ke.push(tr.totals.k_e);
    }
    let diffs: Vec<isize> = ke.windows(2).map(|w| w[1] as isize - w[0] as isize).collect();
    ok &= diffs.windows(2).all(|w| w[1] > w[0]);
    (ok, format!("k_m={km:?} k_e={ke:?}"))
}

fn fuzz(sys: System, count: usize, generator: Generator) -> FuzzReport {
    let mut cfg = FuzzConfig::new(sys);
    cfg.count = count;
    cfg.seed = SEED;
    cfg.generator = generator;
    run_fuzz(&cfg)
}

fn pass(r: &FuzzReport, name: &str) -> usize {
    r.passes.get(name).copied().unwrap_or(0)
}

fn failures_of(r: &FuzzReport, names: &[&str]) -> usize {
    r.failures.iter().filter(|f| names.contains(&f.check.as_str())).count()
}

fn show_failures(r: &FuzzReport) -> String {
    r.failures.iter().take(3).map(|f| format!(" [{}: {} — {}]", f.check, f.term, f.detail)).collect()
}

fn criterion7() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ok = true;
    let mut bad = None;
    for _ in 0..500 {
        let t = lo_normal_form(&mut rng, 14);
        let size = t.size(System::Lo).unwrap();
        let tight = type_normal_form(System::Lo, &t).unwrap();
        let mts = mts_type_normal_form(&t, None).unwrap();
        let (a, b) = (tight.indices(), mts.indices());
        let good = check(&tight).is_ok()
            && check(&mts).is_ok()
            && (a.b, a.r) == (0, size)
            && (b.b, b.r) == (size, 0)
            && mts.type_size() == size
            && tight.size() == size
            && mts.size() == size
            && mts.flags().traditional
            && mts.flags().shrinking;
        if !good && bad.is_none() {
            bad = Some(t.to_string());
        }
        ok &= good;
    }
    (ok, format!("500 normal forms{}", bad.map_or(String::new(), |t| format!(", first failure: {t}"))))
}

/// Positive/negative sub-occurrences of a type, by the definition.
fn subs(t: &AnyType, p: Polarity, out: &mut Vec<(AnyType, Polarity)>) {
    out.push((t.clone(), p));
    match t {
        AnyType::Type(Type::Arrow(m, c)) => {
            subs(&AnyType::Multi(m.clone()), p.compose(Polarity::Neg), out);
            subs(&AnyType::Type((**c).clone()), p, out);
        }
        AnyType::Multi(m) => {
            for s in m.iter() {
                subs(&AnyType::Type(s.clone()), p, out);
            }
        }
        AnyType::Type(_) => {}
    }
}

fn criterion8(hd: &FuzzReport, lo: &FuzzReport, lsc: &FuzzReport, mx: &FuzzReport) -> (bool, String) {
    let mut notes = Vec::new();
    let mut ok = true;
    let names = [
        "size_identity",
        "spreading",
        "neutral_iff",
        "step_iff_normal",
        "determinism",
        "shrinking_reduction",
        "generic_reduction",
        "normal_size_bound",
        "tight_normal",
        "neutrality",
    ];
    for r in [hd, lo, lsc, mx] {
        ok &= failures_of(r, &names) == 0;
    }
    ok &= pass(lo, "shrinking_reduction") > 0 && pass(lo, "generic_reduction") > 0;
    notes.push(format!(
        "fuzz: size_identity={} spreading={} shrinking_reduction={} generic_reduction={}",
        [hd, lo, lsc, mx].iter().map(|r| pass(r, "size_identity")).sum::<usize>(),
        [hd, lo, lsc, mx].iter().map(|r| pass(r, "spreading")).sum::<usize>(),
        pass(lo, "shrinking_reduction"),
        pass(lo, "generic_reduction"),
    ));

    // predicates and steps on terms with explicit substitutions
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut n = 0;
    for _ in 0..2000 {
        let t = arbitrary_lsc(&mut rng, 12);
        let c = t.classify(System::Lsc).unwrap();
        let stuck = step(System::Lsc, &t).unwrap().is_none();
        ok &= c.neutral == (c.normal && !c.abs) && stuck == c.normal;
        n += 1;
    }
    notes.push(format!("lsc predicates on {n} terms"));

    // tight spreading on random derivations of neutral terms
    let mut spread = 0;
    for _ in 0..500 {
        let t = lo_normal_form(&mut rng, 10);
        for sys in [System::Hd, System::Lo, System::Mx, System::Lsc] {
            let c = t.classify(sys).unwrap();
            let d = random_derivation(&mut rng, sys, &t).unwrap();
            ok &= check(&d).is_ok();
            if sys != System::Lo || d.flags().shrinking {
                ok &= t.size(sys).unwrap() <= d.size();
            }
            if c.neutral && d.context().is_tight() {
                ok &= d.conclusion().is_tight();
                spread += 1;
            }
        }
    }
    notes.push(format!("spreading on {spread} neutral derivations"));

    // transitivity of polarities
    let mut triples = 0;
    for _ in 0..300 {
        let top = AnyType::Type(small_type(&mut rng, 3));
        let mut mid = Vec::new();
        subs(&top, Polarity::Pos, &mut mid);
        for (t1, q) in &mid {
            let mut low = Vec::new();
            subs(t1, Polarity::Pos, &mut low);
            for (t2, p) in &low {
                ok &= occurs(t2, p.compose(*q), &top);
                triples += 1;
            }
        }
    }
    notes.push(format!("polarity transitivity on {triples} triples"));
    (ok, notes.join("; "))
}

fn run(lines: &mut Vec<(usize, Line)>, n: usize, budget_ms: u64, f: &mut dyn FnMut() -> (bool, String)) {
    let start = Instant::now();
    let (ok, detail) = f();
    lines.push((n, Line { ok, detail, took: start.elapsed(), budget: Duration::from_millis(budget_ms) }));
}

fn main() {
    let mut lines: Vec<(usize, Line)> = Vec::new();
    run(&mut lines, 1, 10, &mut criterion1);
    run(&mut lines, 2, 10, &mut criterion2);
    run(&mut lines, 3, 1000, &mut criterion3);

    let start = Instant::now();
    let hd = fuzz(System::Hd, 1000, Generator::Arbitrary);
    let lo = fuzz(System::Lo, 1000, Generator::Arbitrary);
    let lsc = fuzz(System::Lsc, 500, Generator::Arbitrary);
    let mx = fuzz(System::Mx, 300, Generator::SimplyTyped);
    let fuzz_time = start.elapsed();
    let all = [&hd, &lo, &lsc, &mx];
    let eq_checks = ["synthesize", "derivation_checks", "tight", "indices", "root_type"];
    let ok4 = all.iter().all(|r| failures_of(r, &eq_checks) == 0 && pass(r, "indices") == r.normalized);
    let detail4 = format!(
        "normalized hd={}/{} lo={}/{} lsc={}/{} mx={}/{}; failures={}{}",
        hd.normalized,
        hd.attempted,
        lo.normalized,
        lo.attempted,
        lsc.normalized,
        lsc.attempted,
        mx.normalized,
        mx.attempted,
        all.iter().map(|r| r.failures.len()).sum::<usize>(),
        all.iter().map(|r| show_failures(r)).collect::<String>(),
    );
    lines.push((4, Line { ok: ok4 && all.iter().all(|r| r.passed()), detail: detail4, took: fuzz_time, budget: Duration::from_secs(60) }));

    let sr = ["reduce_chain", "reduce_deltas", "expand_inverse"];
    let steps: usize = all.iter().map(|r| pass(r, "reduce_deltas")).sum();
    let ok5 = all.iter().all(|r| failures_of(r, &sr) == 0) && steps > 0;
    lines.push((5, Line { ok: ok5, detail: format!("{steps} reduction steps re-checked"), took: Duration::ZERO, budget: Duration::from_secs(60) }));

    let iso = pass(&hd, "head_iso_indices");
    let ok6 = iso >= 500 && failures_of(&hd, &["head_iso", "head_iso_indices", "head_iso_counts"]) == 0
        && failures_of(&lsc, &["head_iso", "unfolding"]) == 0;
    lines.push((6, Line { ok: ok6, detail: format!("{iso} head derivations transported and back"), took: Duration::ZERO, budget: Duration::from_secs(10) }));

    run(&mut lines, 7, 10_000, &mut criterion7);
    run(&mut lines, 8, 30_000, &mut || criterion8(&hd, &lo, &lsc, &mx));

    lines.sort_by_key(|(n, _)| *n);
    let mut all_ok = true;
    for (n, l) in &lines {
        all_ok &= l.ok;
        let timing = if l.took.is_zero() {
            "within the fuzz budget".to_string()
        } else {
            let within = if l.took <= l.budget { "within" } else { "OVER" };
            format!("{:.1?} {within} budget {:?}", l.took, l.budget)
        };
        println!("criterion {n}: {} — {} ({timing})", if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    if !all_ok {
        std::process::exit(1);
    }
}
