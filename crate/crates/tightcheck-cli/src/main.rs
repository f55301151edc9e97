//! `tightcheck` — evaluate terms, synthesize and check tight derivations.
//!
//! Exit codes: 0 success, 1 check or verification failure, 2 usage or
//! input error. Diagnostics go to stderr, results to stdout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use tightcheck::derivation::check;
use tightcheck::format::{from_json, to_json};
use tightcheck::fuzz::{run_fuzz, FuzzConfig};
use tightcheck::gen::{t_n, Generator};
use tightcheck::synthesis::{mts_type_normal_form, synthesize_tight, to_hd, to_lsc, type_normal_form};
use tightcheck::{evaluate, parse, Derivation, Error, System, Term, Trace, Type, DEFAULT_FUEL};

#[derive(Parser)]
#[command(name = "tightcheck", version, about = "Tight multi types for head, leftmost-outermost, maximal and linear head evaluation")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a term with a strategy.
    Eval {
        #[arg(long, short)]
        system: System,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        /// A term, or `@file`.
        term: String,
    },
    /// Normal / neutral / abstraction predicates.
    Classify {
        #[arg(long, short)]
        system: System,
        term: String,
    },
    /// Size of a term for a system.
    Size {
        #[arg(long, short)]
        system: System,
        term: String,
    },
    /// Tight derivation of a normal form.
    TypeNf {
        #[arg(long, short)]
        system: System,
        term: String,
        /// Write the derivation here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Evaluate, then build a tight derivation by subject expansion.
    Synthesize {
        #[arg(long, short)]
        system: System,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        term: String,
        /// Write the derivation file here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Validate a derivation file.
    Check { file: PathBuf },
    /// Move a head derivation to linear head or back.
    Iso {
        #[arg(value_parser = ["to-lsc", "to-hd"])]
        direction: String,
        file: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Traditional (non-tight) derivation of a leftmost-outermost normal form.
    Mts {
        term: String,
        /// Type for a neutral term.
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random testing of every theorem.
    Fuzz {
        #[arg(long, short)]
        system: System,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Only simply typable (strongly normalising) terms.
        #[arg(long)]
        simply_typed: bool,
        #[arg(long)]
        max_size: Option<usize>,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// The family whose exponential steps grow quadratically.
    Tn {
        #[arg(long)]
        n: usize,
        /// Also print the term.
        #[arg(long)]
        show: bool,
    },
}

/// Buffered stdout.
macro_rules! put {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        let _ = write!($out, $($arg)*);
    }};
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        let _ = writeln!($out, $($arg)*);
    }};
}

/// A failed command: message and exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Check(_)
            | Error::FuelExhausted(_)
            | Error::PoolMismatch(_)
            | Error::SubjectMismatch(_)
            | Error::NotTypedAtRedex(_) => 1,
            Error::Parse(_) | Error::NonPureTerm(_) | Error::NotNormal(_) | Error::InvalidType(_) | Error::Format(_) => 2,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn verify(msg: impl Into<String>) -> Fail {
    Fail(1, msg.into())
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_term(arg: &str) -> Result<Term, Fail> {
    let text = match arg.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => arg.to_string(),
    };
    parse(text.trim()).map_err(|e| usage(format!("parse error at {e}")))
}

fn load(path: &Path) -> Result<Derivation, Fail> {
    let d = from_json(&read(path)?)?;
    check(&d).map_err(Error::from)?;
    Ok(d)
}

fn deriv_value(d: &Derivation) -> Value {
    serde_json::from_str(&to_json(d)).expect("derivation JSON")
}

/// Writes the derivation file to `output`, or to stdout.
fn emit(out: &mut String, d: &Derivation, output: Option<&Path>) -> Result<(), Fail> {
    match output {
        Some(p) => fs::write(p, to_json(d)).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            put!(out, "{}", to_json(d));
            Ok(())
        }
    }
}

fn steps_value(tr: &Trace) -> Value {
    tr.steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({"index": i + 1, "kind": s.kind.label(), "erased": s.kind.erased_size(), "result": s.result.to_string()})
        })
        .collect()
}

fn summary(sys: System, d: &Derivation, tr: &Trace, size: usize) -> String {
    let i = d.indices();
    let t = tr.totals;
    match sys {
        System::Hd | System::Lo => format!("b={} r={} k={} size={size}", i.b, i.r, t.k),
        System::Mx => format!("b={} r={} k={} e_total={} size={size}", i.b, i.r, t.k, t.e_total),
        System::Lsc => format!("b={} e={} r={} k={} k_m={} k_e={} size={size}", i.b, i.e, i.r, t.k, t.k_m, t.k_e),
    }
}

/// The tight-bound equalities for the system.
fn bounds_hold(sys: System, d: &Derivation, tr: &Trace, size: usize) -> bool {
    let i = d.indices();
    let t = tr.totals;
    match sys {
        System::Hd | System::Lo => i.b == 2 * t.k && i.r == size,
        System::Mx => i.b == 2 * t.k && i.r == size + t.e_total,
        System::Lsc => i.b == 2 * t.k_m && i.e == t.k_e && i.r == size,
    }
}

fn run(cli: Cli, out: &mut String) -> Result<(), Fail> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Eval { system, fuel, trace, term } => {
            let t = read_term(&term)?;
            let tr = evaluate(system, &t, fuel)?;
            if json {
                let mut v = json!({
                    "system": system,
                    "normal_form": tr.final_term.to_string(),
                    "reached_normal": tr.reached_normal,
                    "totals": tr.totals,
                });
                if trace {
                    v["steps"] = steps_value(&tr);
                }
                say!(out, "{v}");
            } else {
                if trace {
                    put!(out, "{}", tr.lines());
                }
                say!(out, "{}", tr.final_term);
                let t = tr.totals;
                let counts = match system {
                    System::Hd | System::Lo => format!("k={}", t.k),
                    System::Mx => format!("k={} e_total={}", t.k, t.e_total),
                    System::Lsc => format!("k={} k_m={} k_e={}", t.k, t.k_m, t.k_e),
                };
                say!(out, "{counts} normal={}", tr.reached_normal);
            }
            if !tr.reached_normal {
                return Err(verify(format!("no normal form within {fuel} steps")));
            }
        }
        Cmd::Classify { system, term } => {
            let c = read_term(&term)?.classify(system)?;
            if json {
                say!(out, "{}", json!(c));
            } else {
                say!(out, "normal={} neutral={} abs={}", c.normal, c.neutral, c.abs);
            }
        }
        Cmd::Size { system, term } => {
            let n = read_term(&term)?.size(system)?;
            if json {
                say!(out, "{}", json!({ "size": n }));
            } else {
                say!(out, "{n}");
            }
        }
        Cmd::TypeNf { system, term, output } => {
            let d = type_normal_form(system, &read_term(&term)?)?;
            emit(out, &d, output.as_deref())?;
        }
        Cmd::Synthesize { system, fuel, term, output } => {
            let t = read_term(&term)?;
            let (tr, d) = synthesize_tight(system, &t, fuel)?;
            check(&d).map_err(Error::from)?;
            let size = tr.final_term.size(system)?;
            let line = summary(system, &d, &tr, size);
            if let Some(p) = &output {
                emit(out, &d, Some(p))?;
            }
            if json {
                let v = json!({
                    "system": system,
                    "steps": steps_value(&tr),
                    "normal_form": tr.final_term.to_string(),
                    "totals": tr.totals,
                    "size": size,
                    "indices": d.indices().show(system),
                    "flags": d.flags(),
                    "derivation": deriv_value(&d),
                    "summary": line,
                });
                say!(out, "{v}");
            } else {
                put!(out, "{}", tr.lines());
                if output.is_none() {
                    put!(out, "{}", d.pretty());
                }
                say!(out, "{line}");
            }
            if !bounds_hold(system, &d, &tr, size) || !d.flags().tight {
                return Err(verify(format!("tight bounds do not hold: {line}")));
            }
        }
        Cmd::Check { file } => {
            let d = from_json(&read(&file)?)?;
            let j = check(&d).map_err(Error::from)?;
            let f = d.flags();
            if json {
                say!(out, "{}", json!({ "ok": true, "judgement": j.to_string(), "flags": f, "size": d.size() }));
            } else {
                say!(out, 
                    "ok tight={} garbage_tight={} mx_tight={} traditional={} shrinking={} size={}",
                    f.tight,
                    f.garbage_tight,
                    f.mx_tight,
                    f.traditional,
                    f.shrinking,
                    d.size()
                );
                say!(out, "{j}");
            }
        }
        Cmd::Iso { direction, file, output } => {
            let d = load(&file)?;
            let res = match direction.as_str() {
                "to-lsc" => to_lsc(&d)?,
                _ => to_hd(&d)?,
            };
            check(&res).map_err(Error::from)?;
            emit(out, &res, output.as_deref())?;
        }
        Cmd::Mts { term, ty, output } => {
            let tau = ty.map(|s| s.parse::<Type>()).transpose()?;
            let d = mts_type_normal_form(&read_term(&term)?, tau)?;
            check(&d).map_err(Error::from)?;
            emit(out, &d, output.as_deref())?;
        }
        Cmd::Fuzz { system, count, seed, simply_typed, max_size, fuel } => {
            if count == 0 {
                return Err(usage("--count must be at least 1"));
            }
            let mut cfg = FuzzConfig::new(system);
            cfg.count = count;
            cfg.seed = seed;
            cfg.generator = if simply_typed { Generator::SimplyTyped } else { Generator::Arbitrary };
            if let Some(m) = max_size {
                cfg.max_term_size = m;
            }
            if let Some(f) = fuel {
                cfg.fuel = f;
            }
            let r = run_fuzz(&cfg);
            for f in &r.failures {
                eprintln!("case {}: {} failed on `{}`: {}", f.case, f.check, f.term, f.detail);
            }
            if json {
                say!(out, "{}", json!(r));
            } else {
                say!(out, "{}", r.summary());
                for (name, n) in &r.passes {
                    say!(out, "  {name}={n}");
                }
            }
            if !r.passed() {
                return Err(verify(format!("{} failures", r.failures.len())));
            }
        }
        Cmd::Tn { n, show } => {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let t = t_n(n);
            let tr = evaluate(System::Lsc, &t, usize::MAX)?;
            let tt = tr.totals;
            if json {
                let mut v = json!({ "n": n, "k_m": tt.k_m, "k_e": tt.k_e });
                if show {
                    v["term"] = json!(t.to_string());
                }
                say!(out, "{v}");
            } else {
                if show {
                    say!(out, "{t}");
                }
                say!(out, "n={n} k_m={} k_e={}", tt.k_m, tt.k_e);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let res = run(cli, &mut out);
    // a closed pipe (`| head`) is not an error
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("tightcheck: {msg}");
            ExitCode::from(code)
        }
    }
}
