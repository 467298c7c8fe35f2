//! Abstract syntax of the calculus: expressions, types, latent and visible
//! predicates, plus the structural helpers the checker and evaluator share.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

mod parse;
mod print;

pub use parse::{parse_expr, parse_pred, parse_program, parse_type, ParseError, Program};

/// The fixed set of primitive operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Add1,
    Not,
    IsNumber,
    IsBoolean,
    IsProcedure,
    IsEven,
    IsOdd,
}

impl Constant {
    pub const ALL: [Constant; 7] = [
        Constant::Add1,
        Constant::Not,
        Constant::IsNumber,
        Constant::IsBoolean,
        Constant::IsProcedure,
        Constant::IsEven,
        Constant::IsOdd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Constant::Add1 => "add1",
            Constant::Not => "not",
            Constant::IsNumber => "number?",
            Constant::IsBoolean => "boolean?",
            Constant::IsProcedure => "procedure?",
            Constant::IsEven => "even?",
            Constant::IsOdd => "odd?",
        }
    }

    pub fn from_name(name: &str) -> Option<Constant> {
        Constant::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Words that can never name a variable.
const RESERVED: &[&str] = &["lambda", "if", "tt", "ff", "none", "declare-refinement"];

/// A variable name. Construction validates the surface-syntax rules so that
/// every `Ident` prints to something the parser reads back as a variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid identifier `{0}`")]
pub struct InvalidIdent(pub String);

impl Ident {
    pub fn new(name: &str) -> Result<Ident, InvalidIdent> {
        if is_valid_ident(name) {
            Ok(Ident(Arc::from(name)))
        } else {
            Err(InvalidIdent(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_valid_ident(name: &str) -> bool {
    let numeric = name
        .strip_prefix('-')
        .unwrap_or(name)
        .starts_with(|c: char| c.is_ascii_digit());
    !name.is_empty()
        && !numeric
        && !name.starts_with('#')
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ':' | ';' | '@'))
        && !RESERVED.contains(&name)
        && Constant::from_name(name).is_none()
}

/// Types. `Boolean` and `Bot` are not variants: they are the unions
/// `(U True False)` and `(U)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Top,
    Num,
    True,
    False,
    Arrow(Box<Type>, Box<Type>, Latent),
    Union(Vec<Type>),
    /// The refinement of the argument type of a constant's signature by that
    /// constant. The base type is always derived from the constant.
    Refine(Constant),
}

/// The decoration on an arrow type marking a function as a type test.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Latent {
    None,
    Pred(Box<Type>),
}

impl Type {
    pub fn boolean() -> Type {
        Type::Union(vec![Type::True, Type::False])
    }

    pub fn bot() -> Type {
        Type::Union(Vec::new())
    }

    pub fn arrow(arg: Type, res: Type) -> Type {
        Type::Arrow(Box::new(arg), Box::new(res), Latent::None)
    }

    pub fn pred_arrow(arg: Type, res: Type, latent: Type) -> Type {
        Type::Arrow(Box::new(arg), Box::new(res), Latent::Pred(Box::new(latent)))
    }

    pub fn union(members: impl IntoIterator<Item = Type>) -> Type {
        Type::Union(members.into_iter().collect())
    }

    /// Whether a `Refine` node occurs anywhere inside this type.
    pub fn has_refinement(&self) -> bool {
        match self {
            Type::Refine(_) => true,
            Type::Arrow(a, r, l) => {
                a.has_refinement()
                    || r.has_refinement()
                    || matches!(l, Latent::Pred(p) if p.has_refinement())
            }
            Type::Union(ms) => ms.iter().any(Type::has_refinement),
            _ => false,
        }
    }
}

/// The predicate component of a typing judgment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VisiblePred {
    /// The expression is true exactly when the variable has the type.
    TypeOf(Type, Ident),
    /// The expression is the variable itself.
    Var(Ident),
    True,
    False,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Ident),
    Num(BigInt),
    Bool(bool),
    Const(Constant),
    Abs(Ident, Type, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("substituted term is not closed: `{0}` is free")]
pub struct OpenSubstitute(pub Ident);

impl Expr {
    /// Panics if `name` is not a valid identifier.
    pub fn var(name: &str) -> Expr {
        Expr::Var(Ident::new(name).expect("valid identifier"))
    }

    pub fn num(n: i64) -> Expr {
        Expr::Num(BigInt::from(n))
    }

    /// Panics if `param` is not a valid identifier.
    pub fn abs(param: &str, annot: Type, body: Expr) -> Expr {
        Expr::Abs(
            Ident::new(param).expect("valid identifier"),
            annot,
            Box::new(body),
        )
    }

    pub fn app(rator: Expr, rand: Expr) -> Expr {
        Expr::App(Box::new(rator), Box::new(rand))
    }

    pub fn if_(test: Expr, then: Expr, els: Expr) -> Expr {
        Expr::If(Box::new(test), Box::new(then), Box::new(els))
    }

    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) | Expr::Abs(..)
        )
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => {}
            Expr::Abs(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Expr::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Expr::If(t, a, b) => {
                t.collect_free(bound, out);
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => 1,
            Expr::Abs(_, _, body) => 1 + body.depth(),
            Expr::App(f, a) => 1 + f.depth().max(a.depth()),
            Expr::If(t, a, b) => 1 + t.depth().max(a.depth()).max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => 1,
            Expr::Abs(_, _, body) => 1 + body.size(),
            Expr::App(f, a) => 1 + f.size() + a.size(),
            Expr::If(t, a, b) => 1 + t.size() + a.size() + b.size(),
        }
    }

    /// Replaces the free occurrences of `x` in `self` by the closed term `v`.
    /// Since `v` is closed no binder can capture it.
    pub fn substitute(&self, x: &Ident, v: &Expr) -> Result<Expr, OpenSubstitute> {
        if let Some(free) = v.free_vars().into_iter().next() {
            return Err(OpenSubstitute(free));
        }
        Ok(self.subst_closed(x, v))
    }

    fn subst_closed(&self, x: &Ident, v: &Expr) -> Expr {
        match self {
            Expr::Var(y) if y == x => v.clone(),
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => self.clone(),
            Expr::Abs(y, _, _) if y == x => self.clone(),
            Expr::Abs(y, t, body) => Expr::Abs(y.clone(), t.clone(), Box::new(body.subst_closed(x, v))),
            Expr::App(f, a) => Expr::app(f.subst_closed(x, v), a.subst_closed(x, v)),
            Expr::If(t, a, b) => Expr::if_(
                t.subst_closed(x, v),
                a.subst_closed(x, v),
                b.subst_closed(x, v),
            ),
        }
    }

    /// Whether any annotation mentions a refinement or the term uses a
    /// refining constant.
    pub fn uses_refinements(&self) -> bool {
        match self {
            Expr::Const(c) => matches!(c, Constant::IsEven | Constant::IsOdd),
            Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) => false,
            Expr::Abs(_, t, body) => t.has_refinement() || body.uses_refinements(),
            Expr::App(f, a) => f.uses_refinements() || a.uses_refinements(),
            Expr::If(t, a, b) => {
                t.uses_refinements() || a.uses_refinements() || b.uses_refinements()
            }
        }
    }
}
