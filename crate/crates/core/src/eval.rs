//! Call-by-value small-step reduction with left-to-right evaluation contexts.

use num_integer::Integer;

use crate::syntax::{Constant, Expr, Ident};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Expr),
    AlreadyValue,
    /// No rule applies to the redex in evaluation position.
    Stuck { reason: String, redex: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Expr),
    FuelExhausted { last: Expr, steps: usize },
    StuckAt { expr: Expr, redex: Expr, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot reduce an open term: `{0}` is free")]
pub struct OpenTermError(pub Ident);

pub const NOT_APPLICABLE: &str = "operator not applicable";

/// Applies a primitive to a value; `None` when the primitive is undefined
/// there.
pub fn delta_apply(c: Constant, v: &Expr) -> Option<Expr> {
    debug_assert!(v.is_value(), "primitives take values");
    let truth = |b: bool| Some(Expr::Bool(b));
    match (c, v) {
        (Constant::Add1, Expr::Num(n)) => Some(Expr::Num(n + 1)),
        (Constant::Not, _) => truth(*v == Expr::Bool(false)),
        (Constant::IsNumber, _) => truth(matches!(v, Expr::Num(_))),
        (Constant::IsBoolean, _) => truth(matches!(v, Expr::Bool(_))),
        (Constant::IsProcedure, _) => truth(matches!(v, Expr::Abs(..) | Expr::Const(_))),
        (Constant::IsEven, Expr::Num(n)) => truth(n.is_even()),
        (Constant::IsOdd, Expr::Num(n)) => truth(n.is_odd()),
        (Constant::Add1 | Constant::IsEven | Constant::IsOdd, _) => None,
    }
}

pub fn step(e: &Expr) -> Result<StepResult, OpenTermError> {
    if let Some(x) = e.free_vars().into_iter().next() {
        return Err(OpenTermError(x));
    }
    Ok(reduce(e))
}

/// One step of a closed term: find the redex in evaluation position and
/// contract it.
fn reduce(e: &Expr) -> StepResult {
    if e.is_value() {
        return StepResult::AlreadyValue;
    }
    let plug = |inner: StepResult, rebuild: &dyn Fn(Expr) -> Expr| match inner {
        StepResult::Stepped(next) => StepResult::Stepped(rebuild(next)),
        other => other,
    };
    match e {
        Expr::App(f, a) if !f.is_value() => plug(reduce(f), &|f2| Expr::App(Box::new(f2), a.clone())),
        Expr::App(f, a) if !a.is_value() => plug(reduce(a), &|a2| Expr::App(f.clone(), Box::new(a2))),
        Expr::App(f, a) => match &**f {
            Expr::Const(c) => match delta_apply(*c, a) {
                Some(v) => StepResult::Stepped(v),
                None => StepResult::Stuck {
                    reason: format!("{c} is undefined on {a}"),
                    redex: e.clone(),
                },
            },
            Expr::Abs(x, _, body) => StepResult::Stepped(
                body.substitute(x, a).expect("arguments of closed terms are closed"),
            ),
            _ => StepResult::Stuck {
                reason: NOT_APPLICABLE.to_string(),
                redex: e.clone(),
            },
        },
        Expr::If(t, a, b) if !t.is_value() => plug(reduce(t), &|t2| Expr::If(Box::new(t2), a.clone(), b.clone())),
        Expr::If(t, a, b) => {
            if **t == Expr::Bool(false) {
                StepResult::Stepped((**b).clone())
            } else {
                StepResult::Stepped((**a).clone())
            }
        }
        Expr::Var(x) => unreachable!("closed term contains free `{x}`"),
        Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) | Expr::Abs(..) => unreachable!("values handled above"),
    }
}

/// Every term of a bounded reduction sequence, first and last included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub terms: Vec<Expr>,
    pub outcome: EvalOutcome,
}

pub fn trace(e: &Expr, fuel: usize) -> Result<Trace, OpenTermError> {
    if let Some(x) = e.free_vars().into_iter().next() {
        return Err(OpenTermError(x));
    }
    let mut terms = vec![e.clone()];
    loop {
        let current = terms.last().expect("nonempty");
        let steps = terms.len() - 1;
        let outcome = match reduce(current) {
            StepResult::AlreadyValue => EvalOutcome::Value(current.clone()),
            StepResult::Stuck { reason, redex } => EvalOutcome::StuckAt {
                expr: current.clone(),
                redex,
                reason,
            },
            StepResult::Stepped(_) if steps >= fuel => EvalOutcome::FuelExhausted {
                last: current.clone(),
                steps,
            },
            StepResult::Stepped(next) => {
                terms.push(next);
                continue;
            }
        };
        return Ok(Trace { terms, outcome });
    }
}

pub fn evaluate(e: &Expr, fuel: usize) -> Result<EvalOutcome, OpenTermError> {
    if let Some(x) = e.free_vars().into_iter().next() {
        return Err(OpenTermError(x));
    }
    let mut current = e.clone();
    for steps in 0.. {
        match reduce(&current) {
            StepResult::AlreadyValue => return Ok(EvalOutcome::Value(current)),
            StepResult::Stuck { reason, redex } => {
                return Ok(EvalOutcome::StuckAt {
                    expr: current,
                    redex,
                    reason,
                })
            }
            StepResult::Stepped(_) if steps >= fuel => {
                return Ok(EvalOutcome::FuelExhausted { last: current, steps })
            }
            StepResult::Stepped(next) => current = next,
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn e(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn delta_table() {
        assert_eq!(delta_apply(Constant::Add1, &Expr::num(41)), Some(Expr::num(42)));
        assert_eq!(delta_apply(Constant::IsProcedure, &e("add1")), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::IsProcedure, &e("(lambda (x : Top) x)")), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::IsProcedure, &Expr::num(0)), Some(Expr::Bool(false)));
        assert_eq!(delta_apply(Constant::IsEven, &Expr::num(-4)), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::IsOdd, &Expr::num(-3)), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::Add1, &Expr::Bool(true)), None);
        assert_eq!(delta_apply(Constant::IsEven, &Expr::Bool(true)), None);
        assert_eq!(delta_apply(Constant::Not, &Expr::Bool(false)), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::Not, &Expr::num(0)), Some(Expr::Bool(false)));
        assert_eq!(delta_apply(Constant::IsBoolean, &Expr::Bool(false)), Some(Expr::Bool(true)));
        assert_eq!(delta_apply(Constant::IsNumber, &Expr::Bool(false)), Some(Expr::Bool(false)));
    }

    #[test]
    fn single_steps() {
        assert_eq!(step(&e("(if 5 1 2)")).unwrap(), StepResult::Stepped(Expr::num(1)));
        assert_eq!(step(&e("(if #f 1 2)")).unwrap(), StepResult::Stepped(Expr::num(2)));
        assert_eq!(
            step(&e("((lambda (x : Top) (number? x)) #f)")).unwrap(),
            StepResult::Stepped(e("(number? #f)"))
        );
        assert_eq!(
            step(&e("(5 5)")).unwrap(),
            StepResult::Stuck {
                reason: NOT_APPLICABLE.into(),
                redex: e("(5 5)")
            }
        );
        assert_eq!(step(&e("42")).unwrap(), StepResult::AlreadyValue);
        assert!(step(&e("(add1 x)")).is_err());
    }

    #[test]
    fn contexts_go_left_to_right() {
        assert_eq!(
            step(&e("((if #t add1 not) (add1 1))")).unwrap(),
            StepResult::Stepped(e("(add1 (add1 1))"))
        );
        assert_eq!(
            step(&e("(add1 (add1 1))")).unwrap(),
            StepResult::Stepped(e("(add1 2)"))
        );
        assert_eq!(
            step(&e("(if (not #f) 1 2)")).unwrap(),
            StepResult::Stepped(e("(if #t 1 2)"))
        );
    }

    #[test]
    fn stuck_terms_report_the_redex() {
        match step(&e("(add1 (add1 #t))")).unwrap() {
            StepResult::Stuck { redex, .. } => assert_eq!(redex, e("(add1 #t)")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evaluation_and_traces() {
        let counter = e("(if (number? #f) (add1 #f) (not #f))");
        assert_eq!(evaluate(&counter, 100).unwrap(), EvalOutcome::Value(Expr::Bool(true)));
        assert_eq!(trace(&counter, 100).unwrap().terms.len(), 4);
        assert_eq!(evaluate(&Expr::num(42), 0).unwrap(), EvalOutcome::Value(Expr::num(42)));
        let t = trace(&e("(add1 (add1 1))"), 10).unwrap();
        assert_eq!(t.terms, vec![e("(add1 (add1 1))"), e("(add1 2)"), e("3")]);
        assert_eq!(t.outcome, EvalOutcome::Value(e("3")));
    }

    #[test]
    fn fuel_bounds_the_number_of_steps() {
        let t = trace(&e("(add1 (add1 1))"), 1).unwrap();
        assert_eq!(t.terms.len(), 2);
        assert_eq!(
            t.outcome,
            EvalOutcome::FuelExhausted {
                last: e("(add1 2)"),
                steps: 1
            }
        );
        assert!(matches!(
            evaluate(&e("(add1 1)"), 0).unwrap(),
            EvalOutcome::FuelExhausted { steps: 0, .. }
        ));
        assert!(matches!(evaluate(&e("(1 2)"), 5).unwrap(), EvalOutcome::StuckAt { .. }));
    }
}
