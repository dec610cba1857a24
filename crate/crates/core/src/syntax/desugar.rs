//! Removes comprehension and membership: `{x:A | φ}` becomes
//! `fun x:A => φ` and `t in u` becomes `u @ t`. Idempotent.

use super::ast::Term;

pub fn desugar(t: &Term) -> Term {
    use Term::*;
    let d = |a: &Term| std::boxed::Box::new(desugar(a));
    match t {
        Star | Top | Bot | Var(_) | Const(_) => t.clone(),
        Comprehension(x, ty, b) => Lam(x.clone(), ty.clone(), d(b)),
        Member(a, u) => App(d(u), d(a)),
        Pair(a, b) => Pair(d(a), d(b)),
        App(a, b) => App(d(a), d(b)),
        And(a, b) => And(d(a), d(b)),
        Or(a, b) => Or(d(a), d(b)),
        Implies(a, b) => Implies(d(a), d(b)),
        Eq(ty, a, b) => Eq(ty.clone(), d(a), d(b)),
        Proj1(a) => Proj1(d(a)),
        Proj2(a) => Proj2(d(a)),
        Box(a) => Box(d(a)),
        Lam(x, ty, b) => Lam(x.clone(), ty.clone(), d(b)),
        Forall(x, ty, b) => Forall(x.clone(), ty.clone(), d(b)),
        Exists(x, ty, b) => Exists(x.clone(), ty.clone(), d(b)),
    }
}
