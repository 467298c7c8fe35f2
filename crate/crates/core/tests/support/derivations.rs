//! Brute-force enumeration of typing derivations, used as an oracle for the
//! syntax-directed checker.
//!
//! `Policy::Declarative` tries every rule on every derivation of the
//! premises, and lets a conditional conclude any type from a small pool of
//! upper bounds of its branches. The checker's judgment must be a member.
//!
//! `Policy::Algorithmic` still tries every rule at each node, but then keeps
//! only the instances of the highest ranked rule that applies, and a
//! conditional concludes the union of its branches. The checker must agree
//! with it exactly.

#![allow(dead_code)]

use occurrence_core::checker::{combfilter, env_minus, env_plus, normalize_pred, pred_equal};
use occurrence_core::syntax::{Expr, Latent, Type, VisiblePred};
use occurrence_core::types::{delta_type, normalize, subtype, type_equal};
use occurrence_core::{Judgment, Mode, RefineEnv, TypeEnv};

pub type Derived = Vec<(Type, VisiblePred)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    Declarative,
    Algorithmic,
}

/// Rule instances found at one node, tagged by rank (lower wins).
struct Candidates(Vec<(u8, Type, VisiblePred)>);

impl Candidates {
    fn add(&mut self, rank: u8, t: Type, p: VisiblePred) {
        self.0.push((rank, normalize(&t), normalize_pred(&p)));
    }

    fn finish(self, policy: Policy) -> Derived {
        let best = self.0.iter().map(|c| c.0).min();
        let mut out: Derived = Vec::new();
        for (rank, t, p) in self.0 {
            if policy == Policy::Algorithmic && Some(rank) != best {
                continue;
            }
            if !out.iter().any(|(t2, p2)| *t2 == t && *p2 == p) {
                out.push((t, p));
            }
        }
        out
    }
}

fn sub(delta: &RefineEnv, s: &Type, t: &Type) -> bool {
    subtype(delta, s, t).expect("oracle inputs only use declared refinements")
}

// Ranks. Applications: a bare variable argument yields its narrowing predicate
// first, then the extended rules, then plain application.
const APP_PRED: u8 = 0;
const APP_PRED_TRUE: u8 = 1;
const APP_PRED_FALSE: u8 = 2;
const APP: u8 = 3;
const ABS_PRED: u8 = 0;
const ABS: u8 = 1;
const IF_DECIDED: u8 = 0;
const IF: u8 = 1;

pub fn derivable(delta: &RefineEnv, env: &TypeEnv, e: &Expr, mode: Mode, policy: Policy) -> Derived {
    let mut out = Candidates(Vec::new());
    let recur = |env: &TypeEnv, e: &Expr| derivable(delta, env, e, mode, policy);
    match e {
        Expr::Var(x) => {
            if let Some(t) = env.get(x) {
                out.add(0, t.clone(), VisiblePred::Var(x.clone()));
            }
        }
        Expr::Num(_) => out.add(0, Type::Num, VisiblePred::True),
        Expr::Bool(true) => out.add(0, Type::True, VisiblePred::True),
        Expr::Bool(false) => out.add(0, Type::False, VisiblePred::False),
        Expr::Const(c) => out.add(0, delta_type(*c), VisiblePred::True),
        Expr::Abs(x, sigma, body) => {
            for (t, p) in recur(&env.with(x.clone(), sigma.clone()), body) {
                out.add(ABS, Type::arrow(sigma.clone(), t.clone()), VisiblePred::True);
                if let VisiblePred::TypeOf(s2, y) = &p {
                    if y == x {
                        out.add(ABS_PRED, Type::pred_arrow(sigma.clone(), t.clone(), s2.clone()), VisiblePred::True);
                    }
                }
            }
        }
        Expr::App(rator, rand) => {
            let ops = recur(env, rator);
            let args = recur(env, rand);
            let closed_value = rand.is_value() && rand.is_closed();
            for (op, _) in &ops {
                // Operators must have arrow type outright; an arrow is the
                // least arrow above itself.
                let Type::Arrow(dom, cod, latent) = normalize(op) else { continue };
                for (arg, arg_pred) in &args {
                    if !sub(delta, arg, &dom) {
                        continue;
                    }
                    out.add(APP, (*cod).clone(), VisiblePred::None);
                    let Latent::Pred(sigma) = &latent else { continue };
                    if let (VisiblePred::Var(x), Expr::Var(_)) = (arg_pred, &**rand) {
                        out.add(APP_PRED, (*cod).clone(), VisiblePred::TypeOf((**sigma).clone(), x.clone()));
                    }
                    if mode == Mode::Extended {
                        if sub(delta, arg, sigma) {
                            out.add(APP_PRED_TRUE, (*cod).clone(), VisiblePred::True);
                        }
                        if closed_value && !sub(delta, arg, sigma) {
                            out.add(APP_PRED_FALSE, (*cod).clone(), VisiblePred::False);
                        }
                    }
                }
            }
        }
        Expr::If(test, then, els) => {
            for (_, p1) in recur(env, test) {
                if let (Ok(then_env), Ok(else_env)) = (env_plus(delta, env, &p1), env_minus(delta, env, &p1)) {
                    let elses = recur(&else_env, els);
                    for (t2, p2) in &recur(&then_env, then) {
                        for (t3, p3) in &elses {
                            let join = Type::union([t2.clone(), t3.clone()]);
                            let pool = match policy {
                                Policy::Algorithmic => vec![join],
                                Policy::Declarative => vec![t2.clone(), t3.clone(), join, Type::Top],
                            };
                            for t in pool {
                                if sub(delta, t2, &t) && sub(delta, t3, &t) {
                                    out.add(IF, t, combfilter(&p1, p2, p3));
                                }
                            }
                        }
                    }
                }
                if mode == Mode::Extended {
                    let taken = match p1 {
                        VisiblePred::True => Some(then),
                        VisiblePred::False => Some(els),
                        _ => None,
                    };
                    if let Some(branch) = taken {
                        for (t, p) in recur(env, branch) {
                            if policy == Policy::Declarative {
                                out.add(IF_DECIDED, Type::Top, p.clone());
                            }
                            out.add(IF_DECIDED, t, p);
                        }
                    }
                }
            }
        }
    }
    out.finish(policy)
}

/// Compares the checker's result with both enumerations.
pub fn agrees(
    delta: &RefineEnv,
    env: &TypeEnv,
    e: &Expr,
    mode: Mode,
    checked: Option<&Judgment>,
) -> Result<(), String> {
    let ranked = derivable(delta, env, e, mode, Policy::Algorithmic);
    if ranked.len() > 1 {
        return Err(format!("`{e}`: ranked enumeration is ambiguous: {ranked:?}"));
    }
    match (checked, ranked.first()) {
        (None, None) => return Ok(()),
        (None, Some((t, p))) => return Err(format!("checker rejects `{e}` but the rules give {t} ; {p}")),
        (Some(j), None) => return Err(format!("checker accepts `{e}` as {} ; {} but no rule applies", j.ty, j.pred)),
        (Some(j), Some((t, p))) => {
            if !type_equal(t, &j.ty) || !pred_equal(p, &j.pred) {
                return Err(format!("`{e}`: checker gives {} ; {} but the rules give {t} ; {p}", j.ty, j.pred));
            }
        }
    }
    let j = checked.expect("accepted");
    let all = derivable(delta, env, e, mode, Policy::Declarative);
    if !all.iter().any(|(t, p)| type_equal(t, &j.ty) && pred_equal(p, &j.pred)) {
        return Err(format!("`{e}`: {} ; {} has no declarative derivation", j.ty, j.pred));
    }
    Ok(())
}
