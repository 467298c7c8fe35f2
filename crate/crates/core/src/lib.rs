//! Occurrence typing for a small call-by-value lambda calculus with
//! untagged unions. Type tests narrow variables in conditional branches, and
//! built-in tests like `even?` can double as refinement types.
//!
//! `harness` runs random well-typed programs through the evaluator and checks
//! subject reduction along the way.

pub mod checker;
pub mod eval;
pub mod harness;
pub mod refine;
pub mod syntax;
pub mod types;

pub use checker::{typecheck, Checker, Judgment, Mode, TypeEnv, TypeError};
pub use syntax::{Constant, Expr, Ident, Latent, Type, VisiblePred};
pub use types::RefineEnv;
