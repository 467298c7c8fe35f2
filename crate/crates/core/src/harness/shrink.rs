//! Greedy shrinking of failing terms.

use crate::syntax::{Constant, Expr};

fn children(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Abs(_, _, b) => vec![b],
        Expr::App(f, a) => vec![f, a],
        Expr::If(t, a, b) => vec![t, a, b],
        Expr::Var(_) | Expr::Num(_) | Expr::Bool(_) | Expr::Const(_) => vec![],
    }
}

fn paths(e: &Expr, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(prefix.clone());
    for (i, c) in children(e).into_iter().enumerate() {
        prefix.push(i);
        paths(c, prefix, out);
        prefix.pop();
    }
}

fn at<'e>(e: &'e Expr, path: &[usize]) -> &'e Expr {
    path.iter().fold(e, |e, i| children(e)[*i])
}

fn replace(e: &Expr, path: &[usize], new: &Expr) -> Expr {
    let Some((&i, rest)) = path.split_first() else { return new.clone() };
    let go = |c: &Expr| Box::new(replace(c, rest, new));
    match (e, i) {
        (Expr::Abs(x, t, b), 0) => Expr::Abs(x.clone(), t.clone(), go(b)),
        (Expr::App(f, a), 0) => Expr::App(go(f), a.clone()),
        (Expr::App(f, a), 1) => Expr::App(f.clone(), go(a)),
        (Expr::If(t, a, b), 0) => Expr::If(go(t), a.clone(), b.clone()),
        (Expr::If(t, a, b), 1) => Expr::If(t.clone(), go(a), b.clone()),
        (Expr::If(t, a, b), 2) => Expr::If(t.clone(), a.clone(), go(b)),
        _ => unreachable!("paths come from the term"),
    }
}

/// Replaces subterms by literals, or by their own children, for as long as
/// `fails` keeps holding. `fails` is expected to reject ill-typed terms.
pub fn shrink(e: &Expr, fails: impl Fn(&Expr) -> bool) -> Expr {
    let literals: Vec<Expr> = [Expr::num(0), Expr::Bool(true), Expr::Bool(false)]
        .into_iter()
        .chain(Constant::ALL.iter().map(|c| Expr::Const(*c)))
        .collect();
    let mut best = e.clone();
    'outer: for _ in 0..200 {
        let mut ps = Vec::new();
        paths(&best, &mut Vec::new(), &mut ps);
        for p in ps {
            let here = at(&best, &p);
            let size = here.size();
            let candidates = children(here).into_iter().cloned().chain(literals.iter().cloned());
            for c in candidates {
                if c.size() >= size {
                    continue;
                }
                let next = replace(&best, &p, &c);
                if fails(&next) {
                    best = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    best
}
