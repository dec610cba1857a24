//! Term and formula corpora for property checks. Generation is seeded and
//! deterministic.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{fresh_name, substitute, Context, Term, Type};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Generates well-typed terms over a fixed context. Auxiliary types are
/// drawn from `atoms`, so every generated subterm has a type of height at
/// most `1 + max height in atoms`.
pub struct TermGen {
    rng: ChaCha8Rng,
    atoms: Vec<Type>,
    counter: usize,
}

impl TermGen {
    /// `atoms` must be non-empty and every atom must be inhabited by some
    /// closed term or context variable.
    pub fn new(seed: u64, atoms: Vec<Type>) -> TermGen {
        assert!(!atoms.is_empty(), "atoms must be non-empty");
        TermGen { rng: ChaCha8Rng::seed_from_u64(seed), atoms, counter: 0 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn pick_atom(&mut self) -> Type {
        self.atoms.choose(&mut self.rng).expect("atoms").clone()
    }

    fn fresh(&mut self, ctx: &Context) -> String {
        self.counter += 1;
        let avoid = ctx.vars().iter().map(|(n, _)| n.clone()).collect();
        fresh_name(&format!("z{}", self.counter), &avoid)
    }

    fn vars_of(ctx: &Context, ty: &Type) -> Vec<String> {
        ctx.vars().iter().filter(|(_, t)| t == ty).map(|(n, _)| n.clone()).collect()
    }

    /// A term of type `ty` in `ctx` with constructor depth at most
    /// `depth` beyond what the type itself forces.
    pub fn term(&mut self, ctx: &Context, ty: &Type, depth: usize) -> Term {
        let vars = Self::vars_of(ctx, ty);
        if depth == 0 {
            return self.leaf(ctx, ty, &vars);
        }
        let choice = self.rng.gen_range(0..10);
        if choice < 2 && !vars.is_empty() {
            return Term::var(vars.choose(&mut self.rng).expect("vars"));
        }
        if choice < 4 && ty.height() == 1 {
            // elimination forms: application or projection of something
            // whose type is one step larger
            let a = self.pick_atom();
            return if self.rng.gen_bool(0.5) {
                let f = self.term(ctx, &Type::exp(ty.clone(), a.clone()), depth - 1);
                let x = self.term(ctx, &a, depth - 1);
                Term::app(f, x)
            } else if self.rng.gen_bool(0.5) {
                Term::proj1(self.term(ctx, &Type::prod(ty.clone(), a), depth - 1))
            } else {
                Term::proj2(self.term(ctx, &Type::prod(a, ty.clone()), depth - 1))
            };
        }
        match ty {
            Type::Unit => Term::Star,
            Type::Base(_) => self.leaf(ctx, ty, &vars),
            Type::Prod(a, b) => Term::pair(self.term(ctx, a, depth - 1), self.term(ctx, b, depth - 1)),
            Type::Exp(b, a) => {
                let x = self.fresh(ctx);
                let body = self.term(&ctx.extended(&x, (**a).clone()), b, depth - 1);
                Term::lam(&x, (**a).clone(), body)
            }
            Type::Prop => self.formula(ctx, depth),
        }
    }

    fn formula(&mut self, ctx: &Context, depth: usize) -> Term {
        let d = depth - 1;
        match self.rng.gen_range(0..11) {
            0 => Term::Top,
            1 => Term::Bot,
            2 => Term::and(self.term(ctx, &Type::Prop, d), self.term(ctx, &Type::Prop, d)),
            3 => Term::or(self.term(ctx, &Type::Prop, d), self.term(ctx, &Type::Prop, d)),
            4 => Term::implies(self.term(ctx, &Type::Prop, d), self.term(ctx, &Type::Prop, d)),
            5 => Term::boxed(self.term(ctx, &Type::Prop, d)),
            6 | 7 => {
                let a = self.pick_atom();
                Term::eq(None, self.term(ctx, &a, d), self.term(ctx, &a, d))
            }
            8 => {
                let a = self.pick_atom();
                let s = self.term(ctx, &Type::exp(Type::Prop, a.clone()), d);
                Term::Member(Box::new(self.term(ctx, &a, d)), Box::new(s))
            }
            k => {
                let a = self.pick_atom();
                let x = self.fresh(ctx);
                let body = self.term(&ctx.extended(&x, a.clone()), &Type::Prop, d);
                if k == 9 {
                    Term::forall(&x, a, body)
                } else {
                    Term::exists(&x, a, body)
                }
            }
        }
    }

    fn leaf(&mut self, ctx: &Context, ty: &Type, vars: &[String]) -> Term {
        if !vars.is_empty() && (self.rng.gen_bool(0.7) || matches!(ty, Type::Base(_))) {
            return Term::var(vars.choose(&mut self.rng).expect("vars"));
        }
        match ty {
            Type::Unit => Term::Star,
            Type::Prop => {
                if self.rng.gen_bool(0.5) {
                    Term::Top
                } else {
                    Term::Bot
                }
            }
            Type::Prod(a, b) => Term::pair(self.leaf(ctx, a, &Self::vars_of(ctx, a)), self.leaf(ctx, b, &Self::vars_of(ctx, b))),
            Type::Exp(b, a) => {
                let x = self.fresh(ctx);
                let inner = ctx.extended(&x, (**a).clone());
                let body = self.leaf(&inner, b, &Self::vars_of(&inner, b));
                Term::lam(&x, (**a).clone(), body)
            }
            Type::Base(n) => panic!("no variable of base type `{n}` in context"),
        }
    }
}

/// Formulas built from `atoms` by the connectives, `□`, and quantifiers
/// over the variable `qvar : qty` (the quantifier binds a fresh name and
/// substitutes it for `qvar`).
///
/// Level 0 is the atoms. Level 1 applies one connective to atoms. Level
/// 2 applies a unary former to level 1, or a binary one to a level-1 and
/// an atom in either order. A seeded sample of `extra` level-3 formulas
/// follows. The output has no duplicates and a fixed order.
pub fn formula_corpus(atoms: &[Term], qvar: &str, qty: &Type, extra: usize, seed: u64) -> Vec<Term> {
    let unary = |t: &Term| -> Vec<Term> {
        let z = fresh_name("z", &{
            let mut s = Default::default();
            t.all_names(&mut s);
            s
        });
        let body = substitute(t, qvar, &Term::var(&z));
        vec![
            Term::boxed(t.clone()),
            Term::forall(&z, qty.clone(), body.clone()),
            Term::exists(&z, qty.clone(), body),
        ]
    };
    let binary = |a: &Term, b: &Term| vec![Term::and(a.clone(), b.clone()), Term::or(a.clone(), b.clone()), Term::implies(a.clone(), b.clone())];
    let mut out: Vec<Term> = atoms.to_vec();
    let mut level1 = Vec::new();
    for a in atoms {
        level1.extend(unary(a));
        for b in atoms {
            level1.extend(binary(a, b));
        }
    }
    let mut level2 = Vec::new();
    for t in &level1 {
        level2.extend(unary(t));
        for a in atoms {
            level2.extend(binary(t, a));
            level2.extend(binary(a, t));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level3 = Vec::with_capacity(extra);
    for _ in 0..extra {
        let t = level2.choose(&mut rng).expect("level 2");
        let mut next = if rng.gen_bool(0.4) {
            unary(t)
        } else {
            let u = level1.choose(&mut rng).expect("level 1");
            if rng.gen_bool(0.5) {
                binary(t, u)
            } else {
                binary(u, t)
            }
        };
        level3.push(next.swap_remove(rng.gen_range(0..next.len())));
    }
    out.extend(level1);
    out.extend(level2);
    out.extend(level3);
    let mut seen = std::collections::HashSet::new();
    out.retain(|t| seen.insert(t.to_string()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{typecheck, Signature};

    fn setup() -> (Signature, Context) {
        let sig = Signature { types: ["G".to_string()].into(), ..Default::default() };
        let ctx = Context::from_vars(vec![
            ("x".into(), Type::base("G")),
            ("f".into(), Type::exp(Type::base("G"), Type::base("G"))),
            ("p".into(), Type::Prop),
        ])
        .unwrap();
        (sig, ctx)
    }

    #[test]
    fn generated_terms_typecheck() {
        let (sig, ctx) = setup();
        let mut g = TermGen::new(7, vec![Type::base("G"), Type::Prop, Type::Unit]);
        for k in 0..300 {
            let ty = [Type::Prop, Type::base("G"), Type::exp(Type::Prop, Type::base("G"))][k % 3].clone();
            let t = g.term(&ctx, &ty, 3);
            assert_eq!(typecheck(&sig, &ctx, &t).unwrap(), ty, "{t}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let (_, ctx) = setup();
        let run = || {
            let mut g = TermGen::new(11, vec![Type::base("G"), Type::Prop]);
            (0..20).map(|_| g.term(&ctx, &Type::Prop, 3).to_string()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn corpus_covers_formers() {
        let (sig, ctx) = setup();
        let atoms = vec![Term::Top, Term::var("p"), Term::eq(None, Term::app(Term::var("f"), Term::var("x")), Term::var("x"))];
        let c = formula_corpus(&atoms, "x", &Type::base("G"), 50, 3);
        for t in &c {
            assert_eq!(typecheck(&sig, &ctx, t).unwrap(), Type::Prop, "{t}");
        }
        let text: String = c.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n");
        for needle in ["box", "forall", "exists", "/\\", "\\/", "=>"] {
            assert!(text.contains(needle), "{needle}");
        }
        assert!(c.iter().any(|t| t.depth() >= 3));
    }
}
