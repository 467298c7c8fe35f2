//! Untyped term supplies over the environment `x : Top, y : (U Number Boolean)`.

#![allow(dead_code)]

use occurrence_core::syntax::{parse_type, Constant, Expr, Ident, Type};
use occurrence_core::TypeEnv;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn oracle_env() -> TypeEnv {
    [
        (Ident::new("x").unwrap(), Type::Top),
        (Ident::new("y").unwrap(), parse_type("(U Number Boolean)").unwrap()),
    ]
    .into_iter()
    .collect()
}

const BASE_CONSTANTS: [Constant; 5] = [
    Constant::Add1,
    Constant::Not,
    Constant::IsNumber,
    Constant::IsBoolean,
    Constant::IsProcedure,
];

fn annotations() -> Vec<Type> {
    ["Top", "Number", "Boolean", "(U Number Boolean)", "(-> Number Number)", "(-> Top Boolean : Number)"]
        .iter()
        .map(|s| parse_type(s).unwrap())
        .collect()
}

fn leaves(scope: &[&str]) -> Vec<Expr> {
    let mut out: Vec<Expr> = scope.iter().map(|x| Expr::var(x)).collect();
    out.extend([Expr::num(1), Expr::Bool(true), Expr::Bool(false)]);
    out.extend(BASE_CONSTANTS.iter().map(|c| Expr::Const(*c)));
    out
}

/// Every term of depth at most 2 over the base alphabet.
pub fn exhaustive_depth_two() -> Vec<Expr> {
    let outer = leaves(&["x", "y"]);
    let mut out = outer.clone();
    for annot in annotations() {
        for (param, scope) in [("z", vec!["x", "y", "z"]), ("x", vec!["x", "y"])] {
            for body in leaves(&scope) {
                out.push(Expr::abs(param, annot.clone(), body));
            }
        }
    }
    for f in &outer {
        for a in &outer {
            out.push(Expr::app(f.clone(), a.clone()));
        }
    }
    for t in &outer {
        for a in &outer {
            for b in &outer {
                out.push(Expr::if_(t.clone(), a.clone(), b.clone()));
            }
        }
    }
    out
}

/// A random term of depth at most `depth`, biased towards the shapes
/// occurrence typing cares about: predicate tests on variables, and
/// immediately applied lambdas.
pub fn random_term<R: Rng>(rng: &mut R, depth: usize, scope: &mut Vec<&'static str>) -> Expr {
    let leaf = |rng: &mut R, scope: &[&'static str]| leaves(scope).choose(rng).cloned().unwrap();
    if depth <= 1 || rng.gen_bool(0.25) {
        return leaf(rng, scope);
    }
    match rng.gen_range(0..10) {
        0..=2 => {
            let param = *["z", "x", "w"].choose(rng).unwrap();
            let annot = annotations().choose(rng).cloned().unwrap();
            scope.push(param);
            let body = random_term(rng, depth - 1, scope);
            scope.pop();
            Expr::abs(param, annot, body)
        }
        3..=5 => {
            if rng.gen_bool(0.4) {
                let c = *BASE_CONSTANTS.choose(rng).unwrap();
                let arg = random_term(rng, depth - 1, scope);
                Expr::app(Expr::Const(c), arg)
            } else {
                let f = random_term(rng, depth - 1, scope);
                let a = random_term(rng, depth - 1, scope);
                Expr::app(f, a)
            }
        }
        _ => {
            let test = if rng.gen_bool(0.5) && depth >= 3 {
                let c = *[Constant::IsNumber, Constant::IsBoolean, Constant::IsProcedure].choose(rng).unwrap();
                Expr::app(Expr::Const(c), Expr::var(scope.choose(rng).unwrap()))
            } else {
                random_term(rng, depth - 1, scope)
            };
            let a = random_term(rng, depth - 1, scope);
            let b = random_term(rng, depth - 1, scope);
            Expr::if_(test, a, b)
        }
    }
}
