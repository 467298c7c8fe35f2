//! The occurrence typing judgment `env |- e : type ; pred`.
//!
//! `Mode::Primary` runs the rules a programmer relies on. `Mode::Extended`
//! adds the rules needed to type intermediate terms of a reduction: tests
//! whose outcome is statically known choose a single branch, and applying a
//! predicate to an argument whose type settles the test yields `tt`/`ff`.

use std::collections::BTreeMap;
use std::fmt;

use crate::refine::erase_type;
use crate::syntax::{Constant, Expr, Ident, Latent, Type, VisiblePred};
use crate::types::{delta_type, normalize, subtype, undeclared_refinement, RefineEnv, UndeclaredRefinement};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv(BTreeMap<Ident, Type>);

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn get(&self, x: &Ident) -> Option<&Type> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: Ident, t: Type) {
        self.0.insert(x, t);
    }

    /// A copy of this environment with `x` (re)bound to `t`.
    pub fn with(&self, x: Ident, t: Type) -> TypeEnv {
        let mut out = self.clone();
        out.insert(x, t);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Type)> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Ident, Type)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (Ident, Type)>>(iter: I) -> Self {
        TypeEnv(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Primary,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub ty: Type,
    pub pred: VisiblePred,
}

/// Typing rule names, used for error breadcrumbs and coverage counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Var,
    Num,
    Const,
    True,
    False,
    AbsPred,
    Abs,
    App,
    AppPred,
    If,
    AppPredTrue,
    AppPredFalse,
    IfTrue,
    IfFalse,
}

impl Rule {
    pub const PRIMARY: [Rule; 10] = [
        Rule::Var,
        Rule::Num,
        Rule::Const,
        Rule::True,
        Rule::False,
        Rule::AbsPred,
        Rule::Abs,
        Rule::App,
        Rule::AppPred,
        Rule::If,
    ];

    pub const EXTENDED_ONLY: [Rule; 4] =
        [Rule::AppPredTrue, Rule::AppPredFalse, Rule::IfTrue, Rule::IfFalse];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "T-Var",
            Rule::Num => "T-Num",
            Rule::Const => "T-Const",
            Rule::True => "T-True",
            Rule::False => "T-False",
            Rule::AbsPred => "T-AbsPred",
            Rule::Abs => "T-Abs",
            Rule::App => "T-App",
            Rule::AppPred => "T-AppPred",
            Rule::If => "T-If",
            Rule::AppPredTrue => "T-AppPredTrue",
            Rule::AppPredFalse => "T-AppPredFalse",
            Rule::IfTrue => "T-IfTrue",
            Rule::IfFalse => "T-IfFalse",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How often each rule concluded a judgment, plus two occurrence-typing
/// events: conditionals whose test narrowed a variable, and `combfilter`
/// joining two type tests on the same variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleCounts {
    pub rules: BTreeMap<Rule, u64>,
    pub narrowing: u64,
    pub union_combine: u64,
}

impl RuleCounts {
    fn hit(&mut self, r: Rule) {
        *self.rules.entry(r).or_default() += 1;
    }

    pub fn count(&self, r: Rule) -> u64 {
        self.rules.get(&r).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &RuleCounts) {
        for (r, n) in &other.rules {
            *self.rules.entry(*r).or_default() += n;
        }
        self.narrowing += other.narrowing;
        self.union_combine += other.union_combine;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeErrorKind {
    #[error("unbound variable `{0}`")]
    Unbound(Ident),
    #[error("operator of type {0} is not a function")]
    NotAFunction(Type),
    #[error("argument type {found} is not a subtype of {expected}")]
    ArgumentMismatch { expected: Type, found: Type },
    #[error(transparent)]
    Undeclared(#[from] UndeclaredRefinement),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    /// Rules from the root of the derivation down to the one that failed.
    pub trail: Vec<Rule>,
    pub expr: Expr,
    pub kind: Box<TypeErrorKind>,
}

impl TypeError {
    fn new(rule: Rule, expr: &Expr, kind: impl Into<TypeErrorKind>) -> TypeError {
        TypeError {
            trail: vec![rule],
            expr: expr.clone(),
            kind: Box::new(kind.into()),
        }
    }

    fn within(mut self, rule: Rule) -> TypeError {
        self.trail.insert(0, rule);
        self
    }

    pub fn failed_rule(&self) -> Rule {
        *self.trail.last().expect("nonempty trail")
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trail: Vec<&str> = self.trail.iter().map(|r| r.name()).collect();
        write!(f, "{}: {} in `{}`", trail.join(" > "), self.kind, self.expr)
    }
}

impl std::error::Error for TypeError {}

/// `s` narrowed to the parts that are below `t`.
pub fn restrict(delta: &RefineEnv, s: &Type, t: &Type) -> Result<Type, UndeclaredRefinement> {
    if subtype(delta, s, t)? {
        return Ok(s.clone());
    }
    match s {
        Type::Union(ms) => {
            let parts = ms
                .iter()
                .map(|m| restrict(delta, m, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(normalize(&Type::Union(parts)))
        }
        _ => Ok(t.clone()),
    }
}

/// `s` without the parts that are below `t`.
pub fn remove(delta: &RefineEnv, s: &Type, t: &Type) -> Result<Type, UndeclaredRefinement> {
    if subtype(delta, s, t)? {
        return Ok(Type::bot());
    }
    match s {
        Type::Union(ms) => {
            let parts = ms
                .iter()
                .map(|m| remove(delta, m, t))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(normalize(&Type::Union(parts)))
        }
        _ => Ok(s.clone()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error("unbound variable `{0}`")]
    Unbound(Ident),
    #[error(transparent)]
    Undeclared(#[from] UndeclaredRefinement),
}

impl From<EnvError> for TypeErrorKind {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::Unbound(x) => TypeErrorKind::Unbound(x),
            EnvError::Undeclared(u) => TypeErrorKind::Undeclared(u),
        }
    }
}

fn update(
    g: &TypeEnv,
    x: &Ident,
    f: impl FnOnce(&Type) -> Result<Type, UndeclaredRefinement>,
) -> Result<TypeEnv, EnvError> {
    let current = g.get(x).ok_or_else(|| EnvError::Unbound(x.clone()))?;
    let next = f(current)?;
    Ok(g.with(x.clone(), next))
}

/// The environment for the branch taken when the test holds.
pub fn env_plus(delta: &RefineEnv, g: &TypeEnv, p: &VisiblePred) -> Result<TypeEnv, EnvError> {
    match p {
        VisiblePred::TypeOf(t, x) => update(g, x, |s| restrict(delta, s, t)),
        VisiblePred::Var(x) => update(g, x, |s| remove(delta, s, &Type::False)),
        VisiblePred::True | VisiblePred::False | VisiblePred::None => Ok(g.clone()),
    }
}

/// The environment for the branch taken when the test fails.
pub fn env_minus(delta: &RefineEnv, g: &TypeEnv, p: &VisiblePred) -> Result<TypeEnv, EnvError> {
    match p {
        VisiblePred::TypeOf(t, x) => update(g, x, |s| remove(delta, s, t)),
        VisiblePred::Var(x) => update(g, x, |_| Ok(Type::False)),
        VisiblePred::True | VisiblePred::False | VisiblePred::None => Ok(g.clone()),
    }
}

/// Visible predicates compared with embedded types normalized.
pub fn pred_equal(p: &VisiblePred, q: &VisiblePred) -> bool {
    match (p, q) {
        (VisiblePred::TypeOf(s, x), VisiblePred::TypeOf(t, y)) => {
            x == y && normalize(s) == normalize(t)
        }
        _ => p == q,
    }
}

pub fn normalize_pred(p: &VisiblePred) -> VisiblePred {
    match p {
        VisiblePred::TypeOf(t, x) => VisiblePred::TypeOf(normalize(t), x.clone()),
        _ => p.clone(),
    }
}

/// Which `combfilter` clause fired, numbered in table order.
fn combine(p1: &VisiblePred, p2: &VisiblePred, p3: &VisiblePred) -> (u8, VisiblePred) {
    use VisiblePred as P;
    if pred_equal(p2, p3) {
        return (1, p2.clone());
    }
    match (p1, p2, p3) {
        (P::TypeOf(t, x), P::True, P::TypeOf(s, y)) if x == y => (
            2,
            P::TypeOf(normalize(&Type::union([t.clone(), s.clone()])), x.clone()),
        ),
        (P::True, _, _) => (3, p2.clone()),
        (P::False, _, _) => (4, p3.clone()),
        (_, P::True, P::False) => (5, p1.clone()),
        _ => (6, P::None),
    }
}

/// The predicate of a conditional from the predicates of its test and
/// branches.
pub fn combfilter(p1: &VisiblePred, p2: &VisiblePred, p3: &VisiblePred) -> VisiblePred {
    combine(p1, p2, p3).1
}

/// The sub-predicate ordering relating a reduct's predicate to the original.
pub fn subpred(p1: &VisiblePred, p2: &VisiblePred) -> bool {
    pred_equal(p1, p2)
        || *p2 == VisiblePred::None
        || (*p1 == VisiblePred::True && *p2 != VisiblePred::False)
        || (*p1 == VisiblePred::False && *p2 != VisiblePred::True)
}

/// Deliberate defects for mutation-testing the soundness harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Check the else branch in the unnarrowed environment.
    SkipEnvMinus,
    /// Check the else branch in the then branch's environment.
    ElseUnderEnvPlus,
    /// Type `#t` and `#f` at Boolean. A variable narrowed to False can then
    /// be replaced by a `#f` of a wider type, which breaks preservation.
    WideBooleanLiterals,
    /// Let a narrowing application fire on any argument whose predicate is
    /// a variable, not only on the variable itself. `(if x 2 #f)` carries
    /// the predicate `x` but its value is not `x`, so a test applied to it
    /// says nothing about `x`.
    LooseAppPred,
}

/// A configured typechecker.
#[derive(Debug, Clone)]
pub struct Checker<'d> {
    delta: &'d RefineEnv,
    mode: Mode,
    erased_constants: bool,
    fault: Option<Fault>,
}

impl<'d> Checker<'d> {
    pub fn new(delta: &'d RefineEnv, mode: Mode) -> Checker<'d> {
        Checker {
            delta,
            mode,
            erased_constants: false,
            fault: None,
        }
    }

    /// Type constants by their erased signatures, e.g. `even?` as
    /// `(-> Number Boolean : Number)`.
    pub fn erased_constants(mut self) -> Self {
        self.erased_constants = true;
        self
    }

    pub fn with_fault(mut self, fault: Option<Fault>) -> Self {
        self.fault = fault;
        self
    }

    pub fn with_mode(&self, mode: Mode) -> Checker<'d> {
        Checker { mode, ..self.clone() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn delta(&self) -> &'d RefineEnv {
        self.delta
    }

    pub fn constant_type(&self, c: Constant) -> Type {
        if self.erased_constants {
            erase_type(&delta_type(c))
        } else {
            delta_type(c)
        }
    }

    pub fn check(&self, env: &TypeEnv, e: &Expr) -> Result<Judgment, TypeError> {
        self.check_counting(env, e, &mut RuleCounts::default())
    }

    pub fn check_counting(
        &self,
        env: &TypeEnv,
        e: &Expr,
        counts: &mut RuleCounts,
    ) -> Result<Judgment, TypeError> {
        self.infer(env, e, counts)
    }

    /// The environments for the two branches of a conditional whose test has
    /// predicate `p`, including any injected fault.
    pub fn branch_envs(&self, env: &TypeEnv, p: &VisiblePred) -> Result<(TypeEnv, TypeEnv), EnvError> {
        let then_env = env_plus(self.delta, env, p)?;
        let else_env = match self.fault {
            Some(Fault::SkipEnvMinus) => env.clone(),
            Some(Fault::ElseUnderEnvPlus) => then_env.clone(),
            Some(Fault::WideBooleanLiterals | Fault::LooseAppPred) | None => env_minus(self.delta, env, p)?,
        };
        Ok((then_env, else_env))
    }

    /// Refinements may only be mentioned once declared.
    fn declared(&self, t: &Type, at: &Expr, rule: Rule) -> Result<(), TypeError> {
        match undeclared_refinement(self.delta, t) {
            Some(c) => Err(TypeError::new(rule, at, UndeclaredRefinement(c))),
            None => Ok(()),
        }
    }

    fn sub(&self, s: &Type, t: &Type, at: &Expr, rule: Rule) -> Result<bool, TypeError> {
        subtype(self.delta, s, t).map_err(|u| TypeError::new(rule, at, u))
    }

    fn infer(&self, env: &TypeEnv, e: &Expr, counts: &mut RuleCounts) -> Result<Judgment, TypeError> {
        let judgment = |ty, pred| Ok(Judgment { ty, pred });
        match e {
            Expr::Var(x) => {
                counts.hit(Rule::Var);
                match env.get(x) {
                    Some(t) => judgment(t.clone(), VisiblePred::Var(x.clone())),
                    None => Err(TypeError::new(Rule::Var, e, TypeErrorKind::Unbound(x.clone()))),
                }
            }
            Expr::Num(_) => {
                counts.hit(Rule::Num);
                judgment(Type::Num, VisiblePred::True)
            }
            Expr::Bool(b) => {
                counts.hit(if *b { Rule::True } else { Rule::False });
                let ty = match (self.fault, b) {
                    (Some(Fault::WideBooleanLiterals), _) => Type::boolean(),
                    (_, true) => Type::True,
                    (_, false) => Type::False,
                };
                judgment(ty, if *b { VisiblePred::True } else { VisiblePred::False })
            }
            Expr::Const(c) => {
                counts.hit(Rule::Const);
                let t = self.constant_type(*c);
                self.declared(&t, e, Rule::Const)?;
                judgment(t, VisiblePred::True)
            }
            Expr::Abs(x, sigma, body) => {
                self.declared(sigma, e, Rule::Abs)?;
                let inner = env.with(x.clone(), sigma.clone());
                let jb = self.infer(&inner, body, counts).map_err(|err| err.within(Rule::Abs))?;
                let latent = match jb.pred {
                    VisiblePred::TypeOf(t, y) if y == *x => {
                        counts.hit(Rule::AbsPred);
                        Latent::Pred(Box::new(t))
                    }
                    _ => {
                        counts.hit(Rule::Abs);
                        Latent::None
                    }
                };
                judgment(
                    Type::Arrow(Box::new(sigma.clone()), Box::new(jb.ty), latent),
                    VisiblePred::True,
                )
            }
            Expr::App(rator, rand) => {
                let jf = self.infer(env, rator, counts).map_err(|err| err.within(Rule::App))?;
                let (dom, cod, latent) = match normalize(&jf.ty) {
                    Type::Arrow(a, r, l) => (*a, *r, l),
                    _ => return Err(TypeError::new(Rule::App, e, TypeErrorKind::NotAFunction(jf.ty))),
                };
                let ja = self.infer(env, rand, counts).map_err(|err| err.within(Rule::App))?;
                if !self.sub(&ja.ty, &dom, e, Rule::App)? {
                    return Err(TypeError::new(
                        Rule::App,
                        e,
                        TypeErrorKind::ArgumentMismatch {
                            expected: dom,
                            found: ja.ty,
                        },
                    ));
                }
                let pred = self.application_pred(e, rand, &latent, &ja, counts)?;
                judgment(cod, pred)
            }
            Expr::If(test, then, els) => {
                let j1 = self.infer(env, test, counts).map_err(|err| err.within(Rule::If))?;
                if self.mode == Mode::Extended {
                    match j1.pred {
                        VisiblePred::True => {
                            counts.hit(Rule::IfTrue);
                            return self.infer(env, then, counts).map_err(|err| err.within(Rule::IfTrue));
                        }
                        VisiblePred::False => {
                            counts.hit(Rule::IfFalse);
                            return self.infer(env, els, counts).map_err(|err| err.within(Rule::IfFalse));
                        }
                        _ => {}
                    }
                }
                counts.hit(Rule::If);
                if matches!(j1.pred, VisiblePred::TypeOf(..) | VisiblePred::Var(_)) {
                    counts.narrowing += 1;
                }
                let (then_env, else_env) = self
                    .branch_envs(env, &j1.pred)
                    .map_err(|err| TypeError::new(Rule::If, e, err))?;
                let j2 = self.infer(&then_env, then, counts).map_err(|err| err.within(Rule::If))?;
                let j3 = self.infer(&else_env, els, counts).map_err(|err| err.within(Rule::If))?;
                let (clause, pred) = combine(&j1.pred, &j2.pred, &j3.pred);
                if clause == 2 {
                    counts.union_combine += 1;
                }
                judgment(normalize(&Type::union([j2.ty, j3.ty])), pred)
            }
        }
    }

    /// Picks the predicate of an application whose operator has latent
    /// predicate `latent`. A variable argument always yields `sigma @ x`, as
    /// in the primary rules, so that abstractions keep their latent predicate
    /// in both modes; otherwise the extended rules settle the test when the
    /// argument's type does.
    fn application_pred(
        &self,
        app: &Expr,
        rand: &Expr,
        latent: &Latent,
        ja: &Judgment,
        counts: &mut RuleCounts,
    ) -> Result<VisiblePred, TypeError> {
        if let Latent::Pred(sigma) = latent {
            // Only a bare variable argument: other terms can carry a variable
            // predicate while evaluating to something else.
            let narrows = match (&ja.pred, rand) {
                (VisiblePred::Var(x), Expr::Var(y)) => x == y,
                (VisiblePred::Var(_), _) => self.fault == Some(Fault::LooseAppPred),
                _ => false,
            };
            if let (true, VisiblePred::Var(x)) = (narrows, &ja.pred) {
                counts.hit(Rule::AppPred);
                return Ok(VisiblePred::TypeOf((**sigma).clone(), x.clone()));
            }
            if self.mode == Mode::Extended {
                if self.sub(&ja.ty, sigma, app, Rule::AppPredTrue)? {
                    counts.hit(Rule::AppPredTrue);
                    return Ok(VisiblePred::True);
                }
                if rand.is_value() && rand.is_closed() {
                    counts.hit(Rule::AppPredFalse);
                    return Ok(VisiblePred::False);
                }
            }
        }
        counts.hit(Rule::App);
        Ok(VisiblePred::None)
    }
}

pub fn typecheck(delta: &RefineEnv, env: &TypeEnv, e: &Expr, mode: Mode) -> Result<Judgment, TypeError> {
    Checker::new(delta, mode).check(env, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_expr, parse_pred, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn pred(s: &str) -> VisiblePred {
        parse_pred(s).unwrap()
    }

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    fn evens() -> RefineEnv {
        [Constant::IsEven].into_iter().collect()
    }

    fn check(delta: &RefineEnv, src: &str, mode: Mode) -> Result<Judgment, TypeError> {
        typecheck(delta, &TypeEnv::new(), &parse_expr(src).unwrap(), mode)
    }

    #[test]
    fn restrict_and_remove() {
        let none = RefineEnv::empty();
        let nb = ty("(U Number Boolean)");
        assert_eq!(restrict(&none, &nb, &Type::Num).unwrap(), Type::Num);
        assert_eq!(restrict(&none, &Type::Num, &Type::Num).unwrap(), Type::Num);
        assert_eq!(
            restrict(&evens(), &Type::Num, &ty("(Refinement even?)")).unwrap(),
            ty("(Refinement even?)")
        );
        assert!(crate::types::type_equal(&remove(&none, &nb, &Type::Num).unwrap(), &Type::boolean()));
        assert_eq!(remove(&none, &Type::Num, &Type::Num).unwrap(), Type::bot());
        assert_eq!(remove(&evens(), &Type::Num, &ty("(Refinement even?)")).unwrap(), Type::Num);
    }

    #[test]
    fn environment_operations() {
        let none = RefineEnv::empty();
        let g: TypeEnv = [(id("x"), ty("(U Number Boolean)"))].into_iter().collect();
        let plus = env_plus(&none, &g, &pred("Number @ x")).unwrap();
        assert_eq!(plus.get(&id("x")), Some(&Type::Num));
        let minus = env_minus(&none, &g, &pred("Number @ x")).unwrap();
        assert_eq!(minus.get(&id("x")), Some(&Type::boolean()));

        let top: TypeEnv = [(id("x"), Type::Top)].into_iter().collect();
        assert_eq!(env_minus(&none, &top, &pred("x")).unwrap().get(&id("x")), Some(&Type::False));
        assert_eq!(env_plus(&none, &top, &pred("x")).unwrap().get(&id("x")), Some(&Type::Top));

        let b: TypeEnv = [(id("b"), Type::boolean())].into_iter().collect();
        assert_eq!(env_plus(&none, &b, &pred("b")).unwrap().get(&id("b")), Some(&Type::True));

        for p in ["tt", "ff", "none"] {
            assert_eq!(env_plus(&none, &g, &pred(p)).unwrap(), g);
            assert_eq!(env_minus(&none, &g, &pred(p)).unwrap(), g);
        }
        assert_eq!(
            env_plus(&none, &g, &pred("Number @ y")),
            Err(EnvError::Unbound(id("y")))
        );
    }

    #[test]
    fn combfilter_clauses() {
        assert_eq!(
            combfilter(&pred("Number @ x"), &pred("tt"), &pred("Boolean @ x")),
            VisiblePred::TypeOf(normalize(&ty("(U Number Boolean)")), id("x"))
        );
        assert_eq!(combfilter(&pred("tt"), &pred("Number @ y"), &pred("ff")), pred("Number @ y"));
        assert_eq!(combfilter(&pred("Number @ x"), &pred("z"), &pred("z")), pred("z"));
        assert_eq!(combfilter(&pred("ff"), &pred("z"), &pred("Number @ y")), pred("Number @ y"));
        assert_eq!(combfilter(&pred("Number @ x"), &pred("tt"), &pred("ff")), pred("Number @ x"));
        assert_eq!(combfilter(&pred("Number @ x"), &pred("tt"), &pred("z")), pred("none"));
        assert_eq!(combfilter(&pred("Number @ x"), &pred("tt"), &pred("Boolean @ y")), pred("none"));
    }

    #[test]
    fn subpred_relation() {
        assert!(subpred(&pred("tt"), &pred("Number @ x")));
        assert!(!subpred(&pred("ff"), &pred("tt")));
        assert!(!subpred(&pred("tt"), &pred("ff")));
        assert!(subpred(&pred("Number @ x"), &pred("none")));
        assert!(subpred(&pred("ff"), &pred("x")));
        assert!(!subpred(&pred("x"), &pred("Number @ x")));
        assert!(subpred(&pred("(U Number) @ x"), &pred("Number @ x")));
    }

    #[test]
    fn bool_or_number_becomes_a_predicate() {
        let j = check(
            &RefineEnv::empty(),
            "(lambda (x : Top) (if (number? x) #t (boolean? x)))",
            Mode::Primary,
        )
        .unwrap();
        assert!(crate::types::type_equal(&j.ty, &ty("(-> Top Boolean : (U Number Boolean))")));
        assert_eq!(j.pred, VisiblePred::True);
    }

    #[test]
    fn occurrence_narrowing_in_both_branches() {
        let j = check(
            &RefineEnv::empty(),
            "(lambda (x : (U Number Boolean)) (if (number? x) (add1 x) (not x)))",
            Mode::Primary,
        )
        .unwrap();
        assert!(crate::types::type_equal(&j.ty, &ty("(-> (U Number Boolean) (U Number Boolean))")));
    }

    #[test]
    fn counterexample_needs_extended_rules() {
        let src = "(if (number? #f) (add1 #f) (not #f))";
        let err = check(&RefineEnv::empty(), src, Mode::Primary).unwrap_err();
        assert_eq!(err.trail, vec![Rule::If, Rule::App]);
        assert_eq!(err.expr.to_string(), "(add1 #f)");
        assert!(matches!(*err.kind, TypeErrorKind::ArgumentMismatch { .. }));

        let j = check(&RefineEnv::empty(), src, Mode::Extended).unwrap();
        assert_eq!(j.ty, Type::boolean());
        assert_eq!(j.pred, VisiblePred::None);
    }

    #[test]
    fn even_consumer() {
        let src = "(lambda (f : (-> (Refinement even?) Number)) (lambda (n : Number) (if (even? n) (f n) n)))";
        let j = check(&evens(), src, Mode::Primary).unwrap();
        assert!(crate::types::type_equal(
            &j.ty,
            &ty("(-> (-> (Refinement even?) Number) (-> Number Number))")
        ));
        assert!(check(
            &evens(),
            "(lambda (f : (-> (Refinement even?) Number)) (lambda (n : Number) (f n)))",
            Mode::Primary
        )
        .is_err());
        let err = check(&RefineEnv::empty(), src, Mode::Primary).unwrap_err();
        assert!(matches!(*err.kind, TypeErrorKind::Undeclared(UndeclaredRefinement(Constant::IsEven))));
    }

    #[test]
    fn values_have_truthy_predicates_except_false() {
        let none = RefineEnv::empty();
        for (src, p) in [
            ("5", VisiblePred::True),
            ("#t", VisiblePred::True),
            ("#f", VisiblePred::False),
            ("add1", VisiblePred::True),
            ("(lambda (x : Top) x)", VisiblePred::True),
        ] {
            assert_eq!(check(&none, src, Mode::Extended).unwrap().pred, p, "{src}");
        }
    }

    #[test]
    fn errors() {
        let none = RefineEnv::empty();
        let err = check(&none, "(5 5)", Mode::Primary).unwrap_err();
        assert!(matches!(*err.kind, TypeErrorKind::NotAFunction(Type::Num)));
        let err = check(&none, "(lambda (x : Top) y)", Mode::Primary).unwrap_err();
        assert_eq!(err.trail, vec![Rule::Abs, Rule::Var]);
        assert_eq!(err.to_string(), "T-Abs > T-Var: unbound variable `y` in `y`");
        let err = check(&none, "(lambda (x : Bot) (x 1))", Mode::Primary).unwrap_err();
        assert!(matches!(*err.kind, TypeErrorKind::NotAFunction(_)));
    }

    #[test]
    fn predicate_application_rules() {
        let none = RefineEnv::empty();
        let g: TypeEnv = [(id("x"), Type::Top)].into_iter().collect();
        let app = parse_expr("(number? x)").unwrap();
        let j = typecheck(&none, &g, &app, Mode::Primary).unwrap();
        assert_eq!(j.pred, pred("Number @ x"));
        let j = typecheck(&none, &g, &parse_expr("(number? 3)").unwrap(), Mode::Extended).unwrap();
        assert_eq!(j.pred, VisiblePred::True);
        let j = typecheck(&none, &g, &parse_expr("(number? #t)").unwrap(), Mode::Extended).unwrap();
        assert_eq!(j.pred, VisiblePred::False);
        let j = typecheck(&none, &g, &parse_expr("(number? (not 1))").unwrap(), Mode::Extended).unwrap();
        assert_eq!(j.pred, VisiblePred::None);
        let j = typecheck(&none, &g, &parse_expr("(not x)").unwrap(), Mode::Primary).unwrap();
        assert_eq!(j.pred, VisiblePred::None);
    }
}
