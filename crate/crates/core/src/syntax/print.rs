use std::fmt;

use super::{Expr, Latent, Program, Type, VisiblePred};

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Top => f.write_str("Top"),
            Type::Num => f.write_str("Number"),
            Type::True => f.write_str("True"),
            Type::False => f.write_str("False"),
            Type::Union(ms) if ms.is_empty() => f.write_str("Bot"),
            Type::Union(ms) if ms[..] == [Type::True, Type::False] => f.write_str("Boolean"),
            Type::Union(ms) => {
                f.write_str("(U")?;
                for m in ms {
                    write!(f, " {m}")?;
                }
                f.write_str(")")
            }
            Type::Arrow(a, r, Latent::None) => write!(f, "(-> {a} {r})"),
            Type::Arrow(a, r, Latent::Pred(l)) => write!(f, "(-> {a} {r} : {l})"),
            Type::Refine(c) => write!(f, "(Refinement {c})"),
        }
    }
}

impl fmt::Display for VisiblePred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VisiblePred::TypeOf(t, x) => write!(f, "{t} @ {x}"),
            VisiblePred::Var(x) => write!(f, "{x}"),
            VisiblePred::True => f.write_str("tt"),
            VisiblePred::False => f.write_str("ff"),
            VisiblePred::None => f.write_str("none"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(x) => write!(f, "{x}"),
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Bool(true) => f.write_str("#t"),
            Expr::Bool(false) => f.write_str("#f"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Abs(x, t, body) => write!(f, "(lambda ({x} : {t}) {body})"),
            Expr::App(rator, rand) => write!(f, "({rator} {rand})"),
            Expr::If(t, a, b) => write!(f, "(if {t} {a} {b})"),
        }
    }
}

/// Directives one per line, then the expression.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.declared {
            writeln!(f, "(declare-refinement {c})")?;
        }
        write!(f, "{}", self.expr)
    }
}
