//! Refinement declarations and erasure of refinements from types, terms,
//! predicates and environments.

use crate::checker::{subpred, Checker, Judgment, Mode, TypeEnv, TypeError};
use crate::syntax::{Constant, Expr, Latent, Type, VisiblePred};
use crate::types::{refinement_base, subtype, type_equal, RefineEnv};

pub fn declare_refinement(delta: &RefineEnv, c: Constant) -> RefineEnv {
    let mut out = delta.clone();
    out.insert(c);
    out
}

pub fn erase_type(t: &Type) -> Type {
    match t {
        Type::Refine(c) => erase_type(&refinement_base(*c)),
        Type::Arrow(a, r, l) => Type::Arrow(
            Box::new(erase_type(a)),
            Box::new(erase_type(r)),
            match l {
                Latent::None => Latent::None,
                Latent::Pred(p) => Latent::Pred(Box::new(erase_type(p))),
            },
        ),
        Type::Union(ms) => Type::Union(ms.iter().map(erase_type).collect()),
        Type::Top | Type::Num | Type::True | Type::False => t.clone(),
    }
}

pub fn erase_expr(e: &Expr) -> Expr {
    match e {
        Expr::Abs(x, t, body) => Expr::Abs(x.clone(), erase_type(t), Box::new(erase_expr(body))),
        Expr::App(f, a) => Expr::app(erase_expr(f), erase_expr(a)),
        Expr::If(t, a, b) => Expr::if_(erase_expr(t), erase_expr(a), erase_expr(b)),
        Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => e.clone(),
    }
}

pub fn erase_pred(p: &VisiblePred) -> VisiblePred {
    match p {
        VisiblePred::TypeOf(t, x) => VisiblePred::TypeOf(erase_type(t), x.clone()),
        _ => p.clone(),
    }
}

pub fn erase_env(g: &TypeEnv) -> TypeEnv {
    g.iter().map(|(x, t)| (x.clone(), erase_type(t))).collect()
}

/// How the judgment of an erased term relates to the erased judgment of the
/// original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErasureVerdict {
    /// Same type (up to normalization) and predicate.
    Exact,
    /// The erased term checks at a subtype with a sub-predicate: the erased
    /// judgment follows by widening a conditional's result.
    Subsumed { erased: Judgment },
    Violated { detail: String },
}

impl ErasureVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, ErasureVerdict::Violated { .. })
    }
}

/// Checks that erasing a well-typed term yields a term typeable, without any
/// refinements, at the erasure of its original judgment.
pub fn erased_judgment(delta: &RefineEnv, g: &TypeEnv, e: &Expr) -> Result<ErasureVerdict, TypeError> {
    let original = Checker::new(delta, Mode::Primary).check(g, e)?;
    let empty = RefineEnv::empty();
    let erased_checker = Checker::new(&empty, Mode::Primary).erased_constants();
    let erased = match erased_checker.check(&erase_env(g), &erase_expr(e)) {
        Ok(j) => j,
        Err(err) => {
            return Ok(ErasureVerdict::Violated {
                detail: format!("erased term does not typecheck: {err}"),
            })
        }
    };
    let want_ty = erase_type(&original.ty);
    let want_pred = erase_pred(&original.pred);
    if type_equal(&erased.ty, &want_ty) && crate::checker::pred_equal(&erased.pred, &want_pred) {
        return Ok(ErasureVerdict::Exact);
    }
    let below = subtype(&empty, &erased.ty, &want_ty).unwrap_or(false);
    if below && subpred(&erased.pred, &want_pred) {
        Ok(ErasureVerdict::Subsumed { erased })
    } else {
        Ok(ErasureVerdict::Violated {
            detail: format!(
                "erased term has {} ; {} but the erased judgment is {} ; {}",
                erased.ty, erased.pred, want_ty, want_pred
            ),
        })
    }
}

/// `false` signals a broken erasure lemma, and so a bug. Terms that do not
/// typecheck in the first place hold vacuously.
pub fn erased_judgment_holds(delta: &RefineEnv, g: &TypeEnv, e: &Expr) -> bool {
    erased_judgment(delta, g, e).map_or(true, |v| v.holds())
}
