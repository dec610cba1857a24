//! Capture-avoiding substitution. A bound name that would capture a free
//! variable of the substituted term is renamed to the first of `x_1`,
//! `x_2`, ... not occurring anywhere in the terms involved.

use std::collections::BTreeSet;

use super::ast::{Context, Signature, Term};
use super::typecheck::{typecheck, TypeError};

/// First `base_k` (k = 1, 2, ...) not in `avoid`. A trailing `_k` on
/// `base` is stripped first so repeated renaming stays short.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = match base.rsplit_once('_') {
        Some((s, k)) if !s.is_empty() && !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()) => s,
        _ => base,
    };
    (1..)
        .map(|k| format!("{stem}_{k}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded search")
}

/// `t[s/x]`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let fv = s.free_vars();
    let mut avoid = BTreeSet::new();
    t.all_names(&mut avoid);
    s.all_names(&mut avoid);
    avoid.insert(x.to_string());
    subst(t, x, s, &fv, &mut avoid)
}

/// Substitution after checking that `s` has the type `x` has in `ctx`.
pub fn substitute_checked(sig: &Signature, ctx: &Context, t: &Term, x: &str, s: &Term) -> Result<Term, TypeError> {
    let want = match ctx.lookup(x) {
        Some((_, ty)) => ty.clone(),
        None => return Err(TypeError::UnboundVariable(x.to_string())),
    };
    let got = typecheck(sig, ctx, s)?;
    if got != want {
        return Err(TypeError::TypeMismatch {
            expected: want.to_string(),
            got: got.to_string(),
            location: s.to_string(),
        });
    }
    Ok(substitute(t, x, s))
}

fn subst(t: &Term, x: &str, s: &Term, fv: &BTreeSet<String>, avoid: &mut BTreeSet<String>) -> Term {
    use Term::*;
    let rec = |a: &Term, avoid: &mut BTreeSet<String>| std::boxed::Box::new(subst(a, x, s, fv, avoid));
    match t {
        Star | Top | Bot | Const(_) => t.clone(),
        Var(y) if y == x => s.clone(),
        Var(_) => t.clone(),
        Pair(a, b) => Pair(rec(a, avoid), rec(b, avoid)),
        App(a, b) => App(rec(a, avoid), rec(b, avoid)),
        And(a, b) => And(rec(a, avoid), rec(b, avoid)),
        Or(a, b) => Or(rec(a, avoid), rec(b, avoid)),
        Implies(a, b) => Implies(rec(a, avoid), rec(b, avoid)),
        Eq(ty, a, b) => Eq(ty.clone(), rec(a, avoid), rec(b, avoid)),
        Member(a, b) => Member(rec(a, avoid), rec(b, avoid)),
        Proj1(a) => Proj1(rec(a, avoid)),
        Proj2(a) => Proj2(rec(a, avoid)),
        Box(a) => Box(rec(a, avoid)),
        Lam(y, ty, b) | Forall(y, ty, b) | Exists(y, ty, b) | Comprehension(y, ty, b) => {
            let (y2, b2) = if y == x || !b.free_vars().contains(x) {
                (y.clone(), (**b).clone())
            } else if fv.contains(y) {
                let z = fresh_name(y, avoid);
                avoid.insert(z.clone());
                let renamed = subst(b, y, &Var(z.clone()), &BTreeSet::from([z.clone()]), avoid);
                (z, subst(&renamed, x, s, fv, avoid))
            } else {
                (y.clone(), subst(b, x, s, fv, avoid))
            };
            let b2 = std::boxed::Box::new(b2);
            match t {
                Lam(..) => Lam(y2, ty.clone(), b2),
                Forall(..) => Forall(y2, ty.clone(), b2),
                Exists(..) => Exists(y2, ty.clone(), b2),
                _ => Comprehension(y2, ty.clone(), b2),
            }
        }
    }
}

/// Full beta normalisation of `(fun x:A => b) @ s` redexes and of
/// projections of pairs. Terminates on well-typed terms.
pub fn beta_normalize(t: &Term) -> Term {
    use Term::*;
    let n = |a: &Term| std::boxed::Box::new(beta_normalize(a));
    match t {
        Star | Top | Bot | Var(_) | Const(_) => t.clone(),
        App(f, a) => {
            let f2 = beta_normalize(f);
            let a2 = beta_normalize(a);
            match f2 {
                Lam(x, _, b) => beta_normalize(&substitute(&b, &x, &a2)),
                other => Term::app(other, a2),
            }
        }
        Proj1(a) => match beta_normalize(a) {
            Pair(l, _) => *l,
            other => Term::proj1(other),
        },
        Proj2(a) => match beta_normalize(a) {
            Pair(_, r) => *r,
            other => Term::proj2(other),
        },
        Pair(a, b) => Pair(n(a), n(b)),
        And(a, b) => And(n(a), n(b)),
        Or(a, b) => Or(n(a), n(b)),
        Implies(a, b) => Implies(n(a), n(b)),
        Eq(ty, a, b) => Eq(ty.clone(), n(a), n(b)),
        Member(a, b) => Member(n(a), n(b)),
        Box(a) => Box(n(a)),
        Lam(x, ty, b) => Lam(x.clone(), ty.clone(), n(b)),
        Forall(x, ty, b) => Forall(x.clone(), ty.clone(), n(b)),
        Exists(x, ty, b) => Exists(x.clone(), ty.clone(), n(b)),
        Comprehension(x, ty, b) => Comprehension(x.clone(), ty.clone(), n(b)),
    }
}
