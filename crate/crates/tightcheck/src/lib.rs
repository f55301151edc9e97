//! Evaluation strategies for the λ-calculus (head, leftmost-outermost,
//! maximal, linear head) together with their multi type systems, a
//! derivation checker, and the constructive side of the tight-bound
//! theorems: tight typings whose indices count evaluation steps and the size
//! of the normal form exactly.

pub mod derivation;
pub mod error;
pub mod format;
pub mod fuzz;
pub mod gen;
pub mod strategy;
pub mod synthesis;
pub mod term;
pub mod types;

mod surgery;

pub use derivation::{Conclusion, DerivFlags, Derivation, Indices, Judgement, Rule};
pub use error::{CheckError, CheckErrorKind, Error, ParseError};
pub use strategy::{evaluate, step, StepKind, StepRecord, Totals, Trace};
pub use term::{parse, Classification, Dir, Name, Path, System, Term};
pub use types::{Context, MultiSet, Polarity, Type};

/// Fuel used when the caller does not pick one.
pub const DEFAULT_FUEL: usize = 10_000;
