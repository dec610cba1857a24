//! Types, terms, sequents and theories of the modal higher-order language,
//! with parsing, printing, typechecking, substitution and desugaring.

pub mod ast;
pub mod desugar;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod subst;
pub mod typecheck;

use thiserror::Error;

pub use ast::{Axiom, Context, Sequent, Signature, Term, Theory, Type};
pub use desugar::desugar;
pub use parser::{parse_context, parse_sequent, parse_term, parse_theory, parse_type};
pub use subst::{beta_normalize, fresh_name, substitute, substitute_checked};
pub use typecheck::{check_type, elaborate, elaborate_sequent, typecheck, TypeError};

/// Syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(types: &[&str]) -> Signature {
        Signature {
            types: types.iter().map(|s| s.to_string()).collect(),
            consts: Default::default(),
        }
    }

    #[test]
    fn parses_box_iff_sequent() {
        let s = parse_sequent("p:P, q:P | box (p <=> q) |- p = q").unwrap();
        assert_eq!(s.context.len(), 2);
        let want = Term::boxed(Term::iff(Term::var("p"), Term::var("q")));
        assert_eq!(s.lhs, want);
        assert_eq!(s.rhs, Term::eq(None, Term::var("p"), Term::var("q")));
        let e = elaborate_sequent(&sig(&[]), &s).unwrap();
        assert_eq!(e.rhs, Term::eq(Some(Type::Prop), Term::var("p"), Term::var("q")));
    }

    #[test]
    fn parses_contextless_sequent() {
        let s = parse_sequent("top |- forall x:A. x = x").unwrap();
        assert!(s.context.is_empty());
        assert_eq!(s.lhs, Term::Top);
        let e = elaborate_sequent(&sig(&["A"]), &s).unwrap();
        assert_eq!(
            e.rhs,
            Term::forall("x", Type::base("A"), Term::eq(Some(Type::base("A")), Term::var("x"), Term::var("x")))
        );
    }

    #[test]
    fn unclosed_paren_reports_position() {
        let err = parse_term("fun x:A => (x").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 14);
        assert!(err.message.contains("expected `)`"), "{err}");
    }

    #[test]
    fn theory_errors_carry_line() {
        let src = "types: A;\naxioms:\n  [ok] x:A | top |- x = x;\n  [bad] top |- (x;\n";
        let err = parse_theory(src).unwrap_err();
        assert_eq!(err.line, 4);
    }

    #[test]
    fn parses_theory_sections() {
        let src = "# comment\ntypes: A, B;\nconsts:\n  f : B^A;\n  c : A;\naxioms:\n  [fc] top |- f @ c = f @ c;\n  x:A | top |- x = c;\n";
        let th = parse_theory(src).unwrap();
        assert_eq!(th.signature.types.len(), 2);
        assert_eq!(th.signature.consts["f"], Type::exp(Type::base("B"), Type::base("A")));
        assert_eq!(th.axioms.len(), 2);
        assert_eq!(th.axioms[0].name, "fc");
        assert_eq!(th.axioms[1].name, "axiom2");
        assert_eq!(th.axioms[1].line, 8);
        let again = parse_theory(&th.to_string()).unwrap();
        assert_eq!(again, Theory { axioms: again.axioms.clone(), ..th.clone() });
        for (a, b) in th.axioms.iter().zip(&again.axioms) {
            assert_eq!(a.sequent, b.sequent);
        }
    }

    #[test]
    fn rejects_p_as_base_type() {
        assert!(parse_theory("types: P;").is_err());
    }

    #[test]
    fn application_typechecks() {
        let ctx = parse_context("f:B^A, x:A").unwrap();
        let t = parse_term("f @ x").unwrap();
        assert_eq!(typecheck(&sig(&["A", "B"]), &ctx, &t).unwrap(), Type::base("B"));
    }

    #[test]
    fn conjunction_of_non_props_rejected() {
        let ctx = parse_context("x:A").unwrap();
        let t = parse_term("x /\\ x").unwrap();
        match typecheck(&sig(&["A"]), &ctx, &t) {
            Err(TypeError::NotAProposition { got, location }) => {
                assert_eq!(got, "A");
                assert_eq!(location, "x");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn typing_errors() {
        let s = sig(&["A", "B"]);
        let ctx = parse_context("f:B^A, y:B, p:A*B").unwrap();
        let cases = [
            ("f @ y", "mismatch"),
            ("y @ y", "function"),
            ("p1 y", "product"),
            ("z", "unbound"),
            ("fun x:C => x", "undeclared"),
            ("y = p1 p", "mismatch"),
            ("p1 p =_B p1 p", "mismatch"),
        ];
        for (src, kind) in cases {
            let e = typecheck(&s, &ctx, &parse_term(src).unwrap()).unwrap_err();
            let ok = match kind {
                "mismatch" => matches!(e, TypeError::TypeMismatch { .. }),
                "function" => matches!(e, TypeError::NotAFunction { .. }),
                "product" => matches!(e, TypeError::NotAProduct { .. }),
                "unbound" => matches!(e, TypeError::UnboundVariable(_)),
                _ => matches!(e, TypeError::UndeclaredType(_)),
            };
            assert!(ok, "{src}: {e}");
        }
        assert!(parse_context("x:A, x:B").is_err());
    }

    #[test]
    fn constants_resolve() {
        let mut s = sig(&["A"]);
        s.consts.insert("c".into(), Type::base("A"));
        let (e, ty) = elaborate(&s, &Context::new(), &parse_term("c = c").unwrap()).unwrap();
        assert_eq!(ty, Type::Prop);
        assert_eq!(
            e,
            Term::eq(Some(Type::base("A")), Term::Const("c".into()), Term::Const("c".into()))
        );
        let ctx = parse_context("c:P").unwrap();
        let (e, _) = elaborate(&s, &ctx, &parse_term("c").unwrap()).unwrap();
        assert_eq!(e, Term::var("c"), "context shadows constants");
    }

    #[test]
    fn comprehension_and_membership() {
        let s = sig(&["A"]);
        let ctx = parse_context("a:A").unwrap();
        let t = parse_term("a in {x:A | x = a}").unwrap();
        assert_eq!(typecheck(&s, &ctx, &t).unwrap(), Type::Prop);
        let d = desugar(&t);
        assert_eq!(d, parse_term("(fun x:A => x = a) @ a").unwrap());
        assert!(d.is_sugar_free());
        assert_eq!(desugar(&d), d);
        assert_eq!(typecheck(&s, &ctx, &d).unwrap(), Type::Prop);
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = parse_term("forall y:A. x = y").unwrap();
        let r = substitute(&t, "x", &Term::var("y"));
        assert_eq!(r, parse_term("forall y_1:A. y = y_1").unwrap());
        assert!(r.free_vars().contains("y"));
        // bound occurrences untouched
        let t = parse_term("fun x:A => x").unwrap();
        assert_eq!(substitute(&t, "x", &Term::var("z")), t);
        // the fresh name skips names already present
        let t = parse_term("exists y:A. x = y /\\ y_1 = y_1").unwrap();
        let r = substitute(&t, "x", &Term::var("y"));
        assert_eq!(r, parse_term("exists y_2:A. y = y_2 /\\ y_1 = y_1").unwrap());
    }

    #[test]
    fn checked_substitution_enforces_types() {
        let s = sig(&["A", "B"]);
        let ctx = parse_context("x:A, b:B").unwrap();
        let t = parse_term("x = x").unwrap();
        assert!(matches!(
            substitute_checked(&s, &ctx, &t, "x", &Term::var("b")),
            Err(TypeError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn beta_reduces() {
        let t = parse_term("(fun x:A => fun y:A => x = y) @ y").unwrap();
        assert_eq!(beta_normalize(&t), parse_term("fun y_1:A => y = y_1").unwrap());
        let t = parse_term("p1 <a, b>").unwrap();
        assert_eq!(beta_normalize(&t), Term::var("a"));
    }

    #[test]
    fn printer_examples() {
        let cases = [
            "p => q => r",
            "(p => q) => r",
            "p /\\ q \\/ r",
            "p /\\ (q \\/ r)",
            "box (p = q)",
            "box p = q",
            "f @ x @ y",
            "f @ (x @ y)",
            "p1 (f @ x)",
            "p => (forall x:A. x = x)",
            "<fun x:A => x, y>",
            "x =_(A * B^A) y",
            "{x:A | x in s}",
        ];
        for src in cases {
            let t = parse_term(src).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(parse_term(&t.to_string()).unwrap(), t);
        }
        assert_eq!(parse_type("A * B * C^B^A").unwrap().to_string(), "A * B * C^B^A");
        assert_eq!(parse_type("(A * B) ^ C").unwrap().to_string(), "(A * B)^C");
        assert_eq!(parse_type("A * (B * C)").unwrap().to_string(), "A * (B * C)");
        assert_eq!(parse_type("(B^A)^C").unwrap().to_string(), "(B^A)^C");
    }

    pub(crate) fn arb_type() -> impl Strategy<Value = Type> {
        let leaf = prop_oneof![
            Just(Type::Unit),
            Just(Type::Prop),
            Just(Type::base("A")),
            Just(Type::base("B")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::prod(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Type::exp(a, b)),
            ]
        })
    }

    fn arb_name() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_]{0,3}".prop_filter("keyword", |s| !lexer::is_keyword(s))
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::Star),
            Just(Term::Top),
            Just(Term::Bot),
            arb_name().prop_map(Term::Var),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            let bx = |t: Term| std::boxed::Box::new(t);
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::pair(a, b)),
                inner.clone().prop_map(Term::proj1),
                inner.clone().prop_map(Term::proj2),
                (arb_name(), arb_type(), inner.clone()).prop_map(|(x, t, b)| Term::lam(&x, t, b)),
                (arb_name(), arb_type(), inner.clone()).prop_map(|(x, t, b)| Term::forall(&x, t, b)),
                (arb_name(), arb_type(), inner.clone()).prop_map(|(x, t, b)| Term::exists(&x, t, b)),
                (arb_name(), arb_type(), inner.clone())
                    .prop_map(move |(x, t, b)| Term::Comprehension(x, t, bx(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::implies(a, b)),
                (proptest::option::of(arb_type()), inner.clone(), inner.clone())
                    .prop_map(|(t, a, b)| Term::eq(t, a, b)),
                (inner.clone(), inner.clone()).prop_map(move |(a, b)| Term::Member(bx(a), bx(b))),
                inner.prop_map(Term::boxed),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in arb_term()) {
            let printed = t.to_string();
            prop_assert_eq!(parse_term(&printed).unwrap(), t);
        }

        #[test]
        fn type_round_trip(t in arb_type()) {
            prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        }

        #[test]
        fn desugar_idempotent(t in arb_term()) {
            let d = desugar(&t);
            prop_assert!(d.is_sugar_free());
            prop_assert_eq!(desugar(&d), d);
        }

        #[test]
        fn substitution_preserves_alpha_class(t in arb_term(), s in arb_term(), x in arb_name()) {
            // substituting a fresh variable and back is the identity up to alpha
            let fresh = Term::var("zz_fresh");
            let there = substitute(&t, &x, &fresh);
            let back = substitute(&there, "zz_fresh", &Term::var(&x));
            prop_assert!(back.alpha_eq(&t), "{} vs {}", back, t);
            // free variables after substitution
            let r = substitute(&t, &x, &s);
            let mut want = t.free_vars();
            if want.remove(&x) {
                want.extend(s.free_vars());
            }
            prop_assert_eq!(r.free_vars(), want);
        }
    }
}
