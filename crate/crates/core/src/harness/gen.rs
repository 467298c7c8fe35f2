//! Type-directed generation of closed, well-typed terms.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::checker::{Checker, Mode, TypeEnv};
use crate::syntax::{parse_type, Constant, Expr, Ident, Latent, Type};
use crate::types::{normalize, subtype, RefineEnv};

const NAMES: [&str; 6] = ["x", "y", "z", "w", "n", "f"];

const BASE_GOALS: [&str; 14] = [
    "Number",
    "Number",
    "Boolean",
    "Boolean",
    "(U Number False)",
    "(U Number Boolean)",
    "(U Number Boolean)",
    "Top",
    "(-> Number Number)",
    "(-> Top Boolean)",
    "(-> Top Boolean : Number)",
    "(-> Top Boolean : Boolean)",
    "(-> (U Number Boolean) Number)",
    "(-> (U Number Boolean) (U Number Boolean))",
];

const REFINED_GOALS: [&str; 4] = [
    "(-> (Refinement even?) Number)",
    "(-> (Refinement odd?) Number)",
    "(-> Number Boolean : (Refinement even?))",
    "(-> (Refinement even?) (Refinement even?))",
];

#[derive(Clone, Copy)]
enum Strategy {
    Leaf,
    If,
    App,
    Lambda,
}

/// Builds terms by inverting the typing rules against a goal type. Every
/// emitted term is re-validated with the checker it was built for.
pub struct Generator<'c, 'd> {
    checker: &'c Checker<'d>,
    goals: Vec<Type>,
    tests: Vec<Constant>,
    constants: Vec<Constant>,
}

impl<'c, 'd> Generator<'c, 'd> {
    /// `checker` should be in primary mode; its refinement environment also
    /// decides whether refinement goals and `even?`/`odd?` tests appear.
    pub fn new(checker: &'c Checker<'d>) -> Generator<'c, 'd> {
        let refined = !checker.delta().is_empty();
        let mut goals: Vec<Type> = BASE_GOALS.iter().map(|s| parse_type(s).expect("goal")).collect();
        let mut tests = vec![Constant::IsNumber, Constant::IsBoolean, Constant::IsProcedure];
        if refined {
            goals.extend(REFINED_GOALS.iter().map(|s| parse_type(s).expect("goal")));
            tests.extend(checker.delta().iter().filter(|c| matches!(c, Constant::IsEven | Constant::IsOdd)));
            goals.retain(|g| crate::types::undeclared_refinement(checker.delta(), g).is_none());
        }
        let constants = Constant::ALL
            .iter()
            .copied()
            .filter(|c| crate::types::undeclared_refinement(checker.delta(), &checker.constant_type(*c)).is_none())
            .collect();
        Generator {
            checker,
            goals,
            tests,
            constants,
        }
    }

    fn delta(&self) -> &RefineEnv {
        self.checker.delta()
    }

    fn sub(&self, s: &Type, t: &Type) -> bool {
        subtype(self.delta(), s, t).unwrap_or(false)
    }

    /// A closed term of depth at most `depth` that the checker accepts.
    pub fn term<R: Rng>(&self, rng: &mut R, depth: usize) -> Expr {
        for d in (1..=depth.max(1)).rev() {
            for _ in 0..8 {
                let goal = self.goals.choose(rng).expect("goals").clone();
                if let Some(e) = self.gen(rng, &goal, &TypeEnv::new(), d) {
                    if e.depth() <= depth && self.checker.check(&TypeEnv::new(), &e).is_ok() {
                        return e;
                    }
                }
            }
        }
        Expr::Num(BigInt::from(rng.gen_range(0..10)))
    }

    fn gen<R: Rng>(&self, rng: &mut R, goal: &Type, env: &TypeEnv, depth: usize) -> Option<Expr> {
        if depth <= 1 {
            return self.leaf(rng, goal, env);
        }
        use Strategy::*;
        let order = match rng.gen_range(0..100) {
            0..=29 => [Leaf, If, App, Lambda],
            30..=59 => [If, App, Lambda, Leaf],
            60..=84 => [App, If, Lambda, Leaf],
            _ => [Lambda, App, If, Leaf],
        };
        order.into_iter().find_map(|s| match s {
            Leaf => self.leaf(rng, goal, env),
            If => self.conditional(rng, goal, env, depth),
            App => self.application(rng, goal, env, depth),
            Lambda => self.lambda(rng, goal, env, depth),
        })
    }

    fn leaf<R: Rng>(&self, rng: &mut R, goal: &Type, env: &TypeEnv) -> Option<Expr> {
        let mut out: Vec<Expr> = env
            .iter()
            .filter(|(_, t)| self.sub(t, goal))
            .map(|(x, _)| Expr::Var(x.clone()))
            .collect();
        out.extend(
            self.constants
                .iter()
                .filter(|c| self.sub(&self.checker.constant_type(**c), goal))
                .map(|c| Expr::Const(*c)),
        );
        if self.sub(&Type::Num, goal) {
            let n = match rng.gen_range(0..10) {
                0 => BigInt::from(1u8) << rng.gen_range(60..90),
                1 => BigInt::from(rng.gen_range(-20..0)),
                _ => BigInt::from(rng.gen_range(0..20)),
            };
            out.push(Expr::Num(n.clone()));
            out.push(Expr::Num(n));
        }
        if self.sub(&Type::True, goal) {
            out.push(Expr::Bool(true));
        }
        if self.sub(&Type::False, goal) {
            out.push(Expr::Bool(false));
        }
        out.choose(rng).cloned()
    }

    /// A conditional whose test is, when possible, a type test on a bound
    /// variable.
    fn conditional<R: Rng>(&self, rng: &mut R, goal: &Type, env: &TypeEnv, depth: usize) -> Option<Expr> {
        let vars: Vec<(&Ident, &Type)> = env.iter().collect();
        if vars.is_empty() && depth >= 5 && rng.gen_bool(0.8) {
            // Bind something to test: ((lambda (x : s) (if (c x) a b)) v)
            let sigma = self.goals.choose(rng).expect("goals").clone();
            let x = Ident::new(NAMES.choose(rng).expect("names")).expect("valid name");
            let body = self.conditional(rng, goal, &env.with(x.clone(), sigma.clone()), depth - 2)?;
            let arg = self.gen(rng, &sigma, env, depth - 1)?;
            return Some(Expr::app(Expr::Abs(x, sigma, Box::new(body)), arg));
        }
        let test = if !vars.is_empty() && depth >= 3 && rng.gen_bool(0.85) {
            let (x, tx) = *vars.choose(rng).expect("nonempty");
            let usable: Vec<Constant> = self
                .tests
                .iter()
                .copied()
                .filter(|c| match normalize(&self.checker.constant_type(*c)) {
                    Type::Arrow(dom, _, _) => self.sub(tx, &dom),
                    _ => false,
                })
                .collect();
            match usable.choose(rng) {
                Some(c) if rng.gen_bool(0.8) => Expr::app(Expr::Const(*c), Expr::Var(x.clone())),
                _ => Expr::Var(x.clone()),
            }
        } else {
            let g = self.goals.choose(rng).expect("goals").clone();
            self.gen(rng, &g, env, depth - 1)?
        };
        let j = self.checker.check(env, &test).ok()?;
        let (then_env, else_env) = self.checker.branch_envs(env, &j.pred).ok()?;
        let a = self.gen(rng, goal, &then_env, depth - 1)?;
        let b = self.gen(rng, goal, &else_env, depth - 1)?;
        Some(Expr::if_(test, a, b))
    }

    fn application<R: Rng>(&self, rng: &mut R, goal: &Type, env: &TypeEnv, depth: usize) -> Option<Expr> {
        let mut kinds = [0, 1, 2];
        kinds.shuffle(rng);
        kinds.into_iter().find_map(|k| match k {
            0 => {
                let ops: Vec<(Expr, Type)> = self
                    .constants
                    .iter()
                    .map(|c| (Expr::Const(*c), self.checker.constant_type(*c)))
                    .chain(env.iter().map(|(x, t)| (Expr::Var(x.clone()), t.clone())))
                    .filter_map(|(op, t)| match normalize(&t) {
                        Type::Arrow(dom, cod, _) if self.sub(&cod, goal) => Some((op, *dom)),
                        _ => None,
                    })
                    .collect();
                let (op, dom) = ops.choose(rng)?;
                let arg = self.gen(rng, dom, env, depth - 1)?;
                Some(Expr::app(op.clone(), arg))
            }
            1 if depth >= 3 => {
                let sigma = self.goals.choose(rng).expect("goals").clone();
                let x = Ident::new(NAMES.choose(rng).expect("names")).expect("valid name");
                let body = self.gen(rng, goal, &env.with(x.clone(), sigma.clone()), depth - 2)?;
                let arg = self.gen(rng, &sigma, env, depth - 1)?;
                Some(Expr::app(Expr::Abs(x, sigma, Box::new(body)), arg))
            }
            _ => None,
        })
    }

    fn lambda<R: Rng>(&self, rng: &mut R, goal: &Type, env: &TypeEnv, depth: usize) -> Option<Expr> {
        let target = match normalize(goal) {
            Type::Top => {
                let arrows: Vec<&Type> = self.goals.iter().filter(|g| matches!(g, Type::Arrow(..))).collect();
                (*arrows.choose(rng)?).clone()
            }
            Type::Union(ms) => {
                let arrows: Vec<&Type> = ms.iter().filter(|g| matches!(g, Type::Arrow(..))).collect();
                (*arrows.choose(rng)?).clone()
            }
            t => t,
        };
        let Type::Arrow(dom, cod, latent) = target else { return None };
        let x = Ident::new(NAMES.choose(rng).expect("names")).expect("valid name");
        let inner = env.with(x.clone(), (*dom).clone());
        let body = match latent {
            Latent::None => self.gen(rng, &cod, &inner, depth - 1)?,
            Latent::Pred(sigma) => {
                if depth < 3 {
                    return None;
                }
                let tests: Vec<Constant> = self
                    .constants
                    .iter()
                    .copied()
                    .filter(|c| match normalize(&self.checker.constant_type(*c)) {
                        Type::Arrow(a, r, Latent::Pred(s)) => {
                            crate::types::type_equal(&s, &sigma) && self.sub(&dom, &a) && self.sub(&r, &cod)
                        }
                        _ => false,
                    })
                    .collect();
                Expr::app(Expr::Const(*tests.choose(rng)?), Expr::Var(x.clone()))
            }
        };
        Some(Expr::Abs(x, *dom, Box::new(body)))
    }
}

/// A closed term of depth at most `depth` that typechecks in primary mode
/// under `delta`.
pub fn gen_typed_term<R: Rng>(rng: &mut R, depth: usize, delta: &RefineEnv) -> Expr {
    let checker = Checker::new(delta, Mode::Primary);
    Generator::new(&checker).term(rng, depth)
}
