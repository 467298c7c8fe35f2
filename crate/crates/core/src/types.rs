//! Subtyping over unions and refinements. Also the types of the primitives.

use std::collections::BTreeSet;

use crate::syntax::{Constant, Latent, Type};

/// The constants admitted as refinement predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefineEnv(BTreeSet<Constant>);

impl RefineEnv {
    pub fn empty() -> RefineEnv {
        RefineEnv::default()
    }

    pub fn contains(&self, c: Constant) -> bool {
        self.0.contains(&c)
    }

    pub fn insert(&mut self, c: Constant) {
        self.0.insert(c);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Constant> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<Constant> for RefineEnv {
    fn from_iter<I: IntoIterator<Item = Constant>>(iter: I) -> Self {
        RefineEnv(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("refinement `{0}` is used but was never declared")]
pub struct UndeclaredRefinement(pub Constant);

pub fn delta_type(c: Constant) -> Type {
    let test = |latent| Type::pred_arrow(Type::Top, Type::boolean(), latent);
    match c {
        Constant::Add1 => Type::arrow(Type::Num, Type::Num),
        Constant::Not => Type::arrow(Type::Top, Type::boolean()),
        Constant::IsNumber => test(Type::Num),
        Constant::IsBoolean => test(Type::boolean()),
        Constant::IsProcedure => test(Type::arrow(Type::bot(), Type::Top)),
        Constant::IsEven => Type::pred_arrow(Type::Num, Type::boolean(), Type::Refine(Constant::IsEven)),
        Constant::IsOdd => Type::pred_arrow(Type::Num, Type::boolean(), Type::Refine(Constant::IsOdd)),
    }
}

/// The type refined by `(Refinement c)`: the argument type of `c`.
pub fn refinement_base(c: Constant) -> Type {
    match delta_type(c) {
        Type::Arrow(arg, _, _) => *arg,
        _ => unreachable!("every constant has an arrow type"),
    }
}

/// Flattens nested unions, drops empty ones, removes duplicate members
/// (keeping the first occurrence) and collapses singleton unions. Applied
/// recursively inside arrows.
pub fn normalize(t: &Type) -> Type {
    match t {
        Type::Arrow(a, r, l) => Type::Arrow(
            Box::new(normalize(a)),
            Box::new(normalize(r)),
            match l {
                Latent::None => Latent::None,
                Latent::Pred(p) => Latent::Pred(Box::new(normalize(p))),
            },
        ),
        Type::Union(members) => {
            let mut flat: Vec<Type> = Vec::with_capacity(members.len());
            for m in members {
                match normalize(m) {
                    Type::Union(inner) => {
                        for i in inner {
                            if !flat.contains(&i) {
                                flat.push(i);
                            }
                        }
                    }
                    n => {
                        if !flat.contains(&n) {
                            flat.push(n);
                        }
                    }
                }
            }
            if flat.len() == 1 {
                flat.pop().expect("one member")
            } else {
                Type::Union(flat)
            }
        }
        Type::Top | Type::Num | Type::True | Type::False | Type::Refine(_) => t.clone(),
    }
}

pub fn type_equal(s: &Type, t: &Type) -> bool {
    normalize(s) == normalize(t)
}

/// Display form of a normalized type: a `True` member directly followed by
/// `False` inside a union is regrouped as `Boolean`. The result is
/// `type_equal` to the input and prints with the usual sugar.
pub fn resugar(t: &Type) -> Type {
    match t {
        Type::Arrow(a, r, l) => Type::Arrow(
            Box::new(resugar(a)),
            Box::new(resugar(r)),
            match l {
                Latent::None => Latent::None,
                Latent::Pred(p) => Latent::Pred(Box::new(resugar(p))),
            },
        ),
        Type::Union(ms) if ms[..] == [Type::True, Type::False] => t.clone(),
        Type::Union(ms) => {
            let mut out = Vec::with_capacity(ms.len());
            let mut i = 0;
            while i < ms.len() {
                if ms[i] == Type::True && ms.get(i + 1) == Some(&Type::False) {
                    out.push(Type::boolean());
                    i += 2;
                } else {
                    out.push(resugar(&ms[i]));
                    i += 1;
                }
            }
            if out.len() == 1 && ms.len() > 1 {
                out.pop().expect("one member")
            } else {
                Type::Union(out)
            }
        }
        _ => t.clone(),
    }
}

/// The first refinement in `t` whose constant is missing from `delta`.
pub fn undeclared_refinement(delta: &RefineEnv, t: &Type) -> Option<Constant> {
    match t {
        Type::Refine(c) if !delta.contains(*c) => Some(*c),
        Type::Arrow(a, r, l) => undeclared_refinement(delta, a)
            .or_else(|| undeclared_refinement(delta, r))
            .or_else(|| match l {
                Latent::Pred(p) => undeclared_refinement(delta, p),
                Latent::None => None,
            }),
        Type::Union(ms) => ms.iter().find_map(|m| undeclared_refinement(delta, m)),
        _ => None,
    }
}

/// Decides `s <: t` under the refinement environment `delta`.
///
/// Every type is below `Top`. A union is below `t` when all of its members
/// are; `s` is below a union when it is below some member. Arrows compare
/// their arguments contravariantly and may forget a latent predicate. `(Refinement c)` is below whatever the base type
/// of `c` is below.
pub fn subtype(delta: &RefineEnv, s: &Type, t: &Type) -> Result<bool, UndeclaredRefinement> {
    if let Some(c) = undeclared_refinement(delta, s).or_else(|| undeclared_refinement(delta, t)) {
        return Err(UndeclaredRefinement(c));
    }
    Ok(sub(&normalize(s), &normalize(t)))
}

/// Both arguments normalized, all refinements declared.
fn sub(s: &Type, t: &Type) -> bool {
    if s == t || *t == Type::Top {
        return true;
    }
    if let Type::Union(ms) = s {
        return ms.iter().all(|m| sub(m, t));
    }
    if let Type::Union(ts) = t {
        if ts.iter().any(|m| sub(s, m)) {
            return true;
        }
    }
    match (s, t) {
        (Type::Refine(c), _) => sub(&refinement_base(*c), t),
        (Type::Arrow(a1, r1, l1), Type::Arrow(a2, r2, l2)) => {
            sub(a2, a1)
                && sub(r1, r2)
                && match (l1, l2) {
                    (_, Latent::None) => true,
                    (Latent::Pred(p1), Latent::Pred(p2)) => p1 == p2,
                    (Latent::None, Latent::Pred(_)) => false,
                }
        }
        _ => false,
    }
}
