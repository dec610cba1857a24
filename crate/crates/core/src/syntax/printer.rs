//! Pretty-printer producing text the parser reads back to the same AST.

use std::fmt;

use super::ast::{Context, Sequent, Term, Theory, Type};

// type levels: product 0, exponent 1, atom 2
fn write_type(t: &Type, level: u8, out: &mut String) {
    match t {
        Type::Unit => out.push('1'),
        Type::Prop => out.push('P'),
        Type::Base(n) => out.push_str(n),
        Type::Prod(a, b) => {
            let wrap = level > 0;
            if wrap {
                out.push('(');
            }
            write_type(a, 0, out);
            out.push_str(" * ");
            write_type(b, 1, out);
            if wrap {
                out.push(')');
            }
        }
        Type::Exp(cod, dom) => {
            let wrap = level > 1;
            if wrap {
                out.push('(');
            }
            write_type(cod, 2, out);
            out.push('^');
            write_type(dom, 1, out);
            if wrap {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_type(self, 0, &mut s);
        f.write_str(&s)
    }
}

// term levels
const BINDER: u8 = 0;
const IMP: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const REL: u8 = 5;
const PREFIX: u8 = 6;
const APP: u8 = 7;
const UNARY: u8 = 8;

fn level_of(t: &Term) -> u8 {
    use Term::*;
    match t {
        Lam(..) | Forall(..) | Exists(..) => BINDER,
        Implies(..) => IMP,
        Or(..) => OR,
        And(..) => AND,
        Eq(..) | Member(..) => REL,
        Box(..) => PREFIX,
        App(..) => APP,
        Proj1(..) | Proj2(..) => UNARY,
        Star | Top | Bot | Var(_) | Const(_) | Pair(..) | Comprehension(..) => 9,
    }
}

fn write_term(t: &Term, level: u8, out: &mut String) {
    use Term::*;
    let wrap = level_of(t) < level;
    if wrap {
        out.push('(');
    }
    match t {
        Star => out.push('*'),
        Top => out.push_str("top"),
        Bot => out.push_str("bot"),
        Var(x) | Const(x) => out.push_str(x),
        Pair(a, b) => {
            out.push('<');
            write_term(a, BINDER, out);
            out.push_str(", ");
            write_term(b, BINDER, out);
            out.push('>');
        }
        Proj1(a) | Proj2(a) => {
            out.push_str(if matches!(t, Proj1(_)) { "p1 " } else { "p2 " });
            write_term(a, UNARY, out);
        }
        Lam(x, ty, b) | Forall(x, ty, b) | Exists(x, ty, b) => {
            let (kw, sep) = match t {
                Lam(..) => ("fun", " =>"),
                Forall(..) => ("forall", "."),
                _ => ("exists", "."),
            };
            out.push_str(&format!("{kw} {x}:{ty}{sep} "));
            write_term(b, BINDER, out);
        }
        Comprehension(x, ty, b) => {
            out.push_str(&format!("{{{x}:{ty} | "));
            write_term(b, BINDER, out);
            out.push('}');
        }
        App(a, b) => {
            write_term(a, APP, out);
            out.push_str(" @ ");
            write_term(b, UNARY, out);
        }
        And(a, b) => {
            write_term(a, AND, out);
            out.push_str(" /\\ ");
            write_term(b, REL, out);
        }
        Or(a, b) => {
            write_term(a, OR, out);
            out.push_str(" \\/ ");
            write_term(b, AND, out);
        }
        Implies(a, b) => {
            write_term(a, OR, out);
            out.push_str(" => ");
            write_term(b, IMP, out);
        }
        Eq(ty, a, b) => {
            write_term(a, PREFIX, out);
            match ty {
                None => out.push_str(" = "),
                Some(ty) => {
                    let mut s = String::new();
                    write_type(ty, 2, &mut s);
                    out.push_str(&format!(" =_{s} "));
                }
            }
            write_term(b, PREFIX, out);
        }
        Member(a, b) => {
            write_term(a, PREFIX, out);
            out.push_str(" in ");
            write_term(b, PREFIX, out);
        }
        Box(a) => {
            out.push_str("box ");
            write_term(a, PREFIX, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, BINDER, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vars().iter().map(|(x, t)| format!("{x}:{t}")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.context.is_empty() {
            write!(f, "{} | ", self.context)?;
        }
        write!(f, "{} |- {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.signature.types.is_empty() {
            let names: Vec<&str> = self.signature.types.iter().map(String::as_str).collect();
            writeln!(f, "types: {};", names.join(", "))?;
        }
        if !self.signature.consts.is_empty() {
            writeln!(f, "consts:")?;
            for (c, t) in &self.signature.consts {
                writeln!(f, "  {c} : {t};")?;
            }
        }
        writeln!(f, "axioms:")?;
        for a in &self.axioms {
            writeln!(f, "  [{}] {};", a.name, a.sequent)?;
        }
        Ok(())
    }
}
