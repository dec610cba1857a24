use thiserror::Error;

use super::ast::{Context, Sequent, Signature, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("undeclared base type `{0}`")]
    UndeclaredType(String),
    #[error("type mismatch in `{location}`: expected {expected}, got {got}")]
    TypeMismatch {
        expected: String,
        got: String,
        location: String,
    },
    #[error("`{location}` has type {got}, not P")]
    NotAProposition { got: String, location: String },
    #[error("`{location}` has type {got}, which is not a function type")]
    NotAFunction { got: String, location: String },
    #[error("`{location}` has type {got}, which is not a product type")]
    NotAProduct { got: String, location: String },
    #[error("variable `{0}` declared twice in a context")]
    DuplicateVariable(String),
}

pub fn check_type(sig: &Signature, t: &Type) -> Result<(), TypeError> {
    match t {
        Type::Unit | Type::Prop => Ok(()),
        Type::Base(n) if sig.types.contains(n) => Ok(()),
        Type::Base(n) => Err(TypeError::UndeclaredType(n.clone())),
        Type::Prod(a, b) | Type::Exp(a, b) => {
            check_type(sig, a)?;
            check_type(sig, b)
        }
    }
}

pub fn check_context(sig: &Signature, ctx: &Context) -> Result<(), TypeError> {
    for (_, t) in ctx.vars() {
        check_type(sig, t)?;
    }
    Ok(())
}

/// The type of `t`, per the formation rules.
pub fn typecheck(sig: &Signature, ctx: &Context, t: &Term) -> Result<Type, TypeError> {
    elaborate(sig, ctx, t).map(|(_, ty)| ty)
}

/// Typechecks and returns the term with constants resolved and every
/// equality annotated with its type.
pub fn elaborate(sig: &Signature, ctx: &Context, t: &Term) -> Result<(Term, Type), TypeError> {
    check_context(sig, ctx)?;
    let mut c = ctx.clone();
    elab(sig, &mut c, t)
}

fn prop(sig: &Signature, ctx: &mut Context, t: &Term) -> Result<Term, TypeError> {
    let (e, ty) = elab(sig, ctx, t)?;
    if ty != Type::Prop {
        return Err(TypeError::NotAProposition {
            got: ty.to_string(),
            location: t.to_string(),
        });
    }
    Ok(e)
}

fn elab(sig: &Signature, ctx: &mut Context, t: &Term) -> Result<(Term, Type), TypeError> {
    use Term::*;
    Ok(match t {
        Star => (Star, Type::Unit),
        Top => (Top, Type::Prop),
        Bot => (Bot, Type::Prop),
        Var(x) => match ctx.lookup(x) {
            Some((_, ty)) => (t.clone(), ty.clone()),
            None => match sig.consts.get(x) {
                Some(ty) => (Const(x.clone()), ty.clone()),
                None => return Err(TypeError::UnboundVariable(x.clone())),
            },
        },
        Const(x) => match sig.consts.get(x) {
            Some(ty) => (t.clone(), ty.clone()),
            None => return Err(TypeError::UnboundVariable(x.clone())),
        },
        Pair(a, b) => {
            let (ea, ta) = elab(sig, ctx, a)?;
            let (eb, tb) = elab(sig, ctx, b)?;
            (Term::pair(ea, eb), Type::prod(ta, tb))
        }
        Proj1(a) | Proj2(a) => {
            let (ea, ta) = elab(sig, ctx, a)?;
            match ta {
                Type::Prod(l, r) => {
                    if matches!(t, Proj1(_)) {
                        (Term::proj1(ea), *l)
                    } else {
                        (Term::proj2(ea), *r)
                    }
                }
                other => {
                    return Err(TypeError::NotAProduct {
                        got: other.to_string(),
                        location: a.to_string(),
                    })
                }
            }
        }
        Lam(x, ty, b) => {
            check_type(sig, ty)?;
            ctx.push(x, ty.clone());
            let r = elab(sig, ctx, b);
            ctx.pop();
            let (eb, tb) = r?;
            (Term::lam(x, ty.clone(), eb), Type::exp(tb, ty.clone()))
        }
        Comprehension(x, ty, b) => {
            check_type(sig, ty)?;
            ctx.push(x, ty.clone());
            let r = prop(sig, ctx, b);
            ctx.pop();
            (Comprehension(x.clone(), ty.clone(), std::boxed::Box::new(r?)), Type::exp(Type::Prop, ty.clone()))
        }
        App(f, s) => {
            let (ef, tf) = elab(sig, ctx, f)?;
            let (es, ts) = elab(sig, ctx, s)?;
            match tf {
                Type::Exp(cod, dom) => {
                    if *dom != ts {
                        return Err(TypeError::TypeMismatch {
                            expected: dom.to_string(),
                            got: ts.to_string(),
                            location: t.to_string(),
                        });
                    }
                    (Term::app(ef, es), *cod)
                }
                other => {
                    return Err(TypeError::NotAFunction {
                        got: other.to_string(),
                        location: f.to_string(),
                    })
                }
            }
        }
        Member(a, u) => {
            let (ea, ta) = elab(sig, ctx, a)?;
            let (eu, tu) = elab(sig, ctx, u)?;
            let want = Type::exp(Type::Prop, ta.clone());
            if tu != want {
                return Err(TypeError::TypeMismatch {
                    expected: want.to_string(),
                    got: tu.to_string(),
                    location: t.to_string(),
                });
            }
            (Member(std::boxed::Box::new(ea), std::boxed::Box::new(eu)), Type::Prop)
        }
        And(a, b) => (Term::and(prop(sig, ctx, a)?, prop(sig, ctx, b)?), Type::Prop),
        Or(a, b) => (Term::or(prop(sig, ctx, a)?, prop(sig, ctx, b)?), Type::Prop),
        Implies(a, b) => (Term::implies(prop(sig, ctx, a)?, prop(sig, ctx, b)?), Type::Prop),
        Forall(x, ty, b) | Exists(x, ty, b) => {
            check_type(sig, ty)?;
            ctx.push(x, ty.clone());
            let r = prop(sig, ctx, b);
            ctx.pop();
            let eb = r?;
            let e = if matches!(t, Forall(..)) {
                Term::forall(x, ty.clone(), eb)
            } else {
                Term::exists(x, ty.clone(), eb)
            };
            (e, Type::Prop)
        }
        Eq(ann, a, b) => {
            let (ea, ta) = elab(sig, ctx, a)?;
            let (eb, tb) = elab(sig, ctx, b)?;
            if ta != tb {
                return Err(TypeError::TypeMismatch {
                    expected: ta.to_string(),
                    got: tb.to_string(),
                    location: t.to_string(),
                });
            }
            if let Some(ann) = ann {
                check_type(sig, ann)?;
                if *ann != ta {
                    return Err(TypeError::TypeMismatch {
                        expected: ann.to_string(),
                        got: ta.to_string(),
                        location: t.to_string(),
                    });
                }
            }
            (Term::eq(Some(ta), ea, eb), Type::Prop)
        }
        Box(a) => (Term::boxed(prop(sig, ctx, a)?), Type::Prop),
    })
}

/// Elaborates both sides of a sequent, which must be propositions.
pub fn elaborate_sequent(sig: &Signature, s: &Sequent) -> Result<Sequent, TypeError> {
    check_context(sig, &s.context)?;
    let mut ctx = s.context.clone();
    let lhs = prop(sig, &mut ctx, &s.lhs)?;
    let rhs = prop(sig, &mut ctx, &s.rhs)?;
    Ok(Sequent::new(s.context.clone(), lhs, rhs))
}
