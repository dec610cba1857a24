use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Unit,
    Prop,
    Base(String),
    Prod(Box<Type>, Box<Type>),
    /// `Exp(b, a)` is `b^a`, functions from `a` to `b`.
    Exp(Box<Type>, Box<Type>),
}

impl Type {
    pub fn base(name: &str) -> Type {
        Type::Base(name.to_string())
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    /// `cod^dom`.
    pub fn exp(cod: Type, dom: Type) -> Type {
        Type::Exp(Box::new(cod), Box::new(dom))
    }

    /// Height of the type tree; atoms have height 1.
    pub fn height(&self) -> usize {
        match self {
            Type::Unit | Type::Prop | Type::Base(_) => 1,
            Type::Prod(a, b) | Type::Exp(a, b) => 1 + a.height().max(b.height()),
        }
    }

    pub fn base_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Type::Unit | Type::Prop => {}
            Type::Base(n) => {
                out.insert(n.clone());
            }
            Type::Prod(a, b) | Type::Exp(a, b) => {
                a.base_names(out);
                b.base_names(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Star,
    Top,
    Bot,
    /// A name as written; elaboration turns undeclared-in-context names
    /// into constants.
    Var(String),
    Const(String),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    Lam(String, Type, Box<Term>),
    App(Box<Term>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Forall(String, Type, Box<Term>),
    Exists(String, Type, Box<Term>),
    Eq(Option<Type>, Box<Term>, Box<Term>),
    Box(Box<Term>),
    /// `{x:A | φ}`, sugar for `fun x:A => φ`.
    Comprehension(String, Type, Box<Term>),
    /// `t in u`, sugar for `u @ t`.
    Member(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Box::new(f), Box::new(x))
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Term, b: Term) -> Term {
        Term::and(Term::implies(a.clone(), b.clone()), Term::implies(b, a))
    }

    pub fn not(a: Term) -> Term {
        Term::implies(a, Term::Bot)
    }

    pub fn eq(ty: Option<Type>, a: Term, b: Term) -> Term {
        Term::Eq(ty, Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Term) -> Term {
        Term::Box(Box::new(a))
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), ty, Box::new(body))
    }

    pub fn forall(x: &str, ty: Type, body: Term) -> Term {
        Term::Forall(x.to_string(), ty, Box::new(body))
    }

    pub fn exists(x: &str, ty: Type, body: Term) -> Term {
        Term::Exists(x.to_string(), ty, Box::new(body))
    }

    pub fn proj1(a: Term) -> Term {
        Term::Proj1(Box::new(a))
    }

    pub fn proj2(a: Term) -> Term {
        Term::Proj2(Box::new(a))
    }

    /// Connective, binder and modality nesting depth.
    pub fn depth(&self) -> usize {
        use Term::*;
        match self {
            Star | Top | Bot | Var(_) | Const(_) => 0,
            Proj1(a) | Proj2(a) | Box(a) => 1 + a.depth(),
            Lam(_, _, b) | Forall(_, _, b) | Exists(_, _, b) | Comprehension(_, _, b) => 1 + b.depth(),
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Eq(_, a, b) | Member(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn size(&self) -> usize {
        use Term::*;
        match self {
            Star | Top | Bot | Var(_) | Const(_) => 1,
            Proj1(a) | Proj2(a) | Box(a) => 1 + a.size(),
            Lam(_, _, b) | Forall(_, _, b) | Exists(_, _, b) | Comprehension(_, _, b) => 1 + b.size(),
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Eq(_, a, b) | Member(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Free variable names (constants excluded).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        use Term::*;
        match self {
            Star | Top | Bot | Const(_) => {}
            Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Proj1(a) | Proj2(a) | Box(a) => a.collect_free(bound, out),
            Lam(x, _, b) | Forall(x, _, b) | Exists(x, _, b) | Comprehension(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Eq(_, a, b) | Member(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        use Term::*;
        match self {
            Star | Top | Bot => {}
            Var(x) | Const(x) => {
                out.insert(x.clone());
            }
            Proj1(a) | Proj2(a) | Box(a) => a.all_names(out),
            Lam(x, _, b) | Forall(x, _, b) | Exists(x, _, b) | Comprehension(x, _, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Eq(_, a, b) | Member(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
        }
    }

    pub fn is_sugar_free(&self) -> bool {
        use Term::*;
        match self {
            Comprehension(..) | Member(..) => false,
            Star | Top | Bot | Var(_) | Const(_) => true,
            Proj1(a) | Proj2(a) | Box(a) => a.is_sugar_free(),
            Lam(_, _, b) | Forall(_, _, b) | Exists(_, _, b) => b.is_sugar_free(),
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Eq(_, a, b) => {
                a.is_sugar_free() && b.is_sugar_free()
            }
        }
    }

    /// A key equal for alpha-equivalent terms: bound names become de
    /// Bruijn indices, free names stay.
    pub fn alpha_key(&self) -> String {
        let mut s = String::new();
        self.write_key(&mut Vec::new(), &mut s);
        s
    }

    fn write_key(&self, bound: &mut Vec<String>, s: &mut String) {
        use std::fmt::Write;
        use Term::*;
        let bin = |tag: &str, x: &String, ty: &Type, b: &Term, bound: &mut Vec<String>, s: &mut String| {
            let _ = write!(s, "({tag} {ty:?} ");
            bound.push(x.clone());
            b.write_key(bound, s);
            bound.pop();
            s.push(')');
        };
        match self {
            Star => s.push('*'),
            Top => s.push('T'),
            Bot => s.push('F'),
            Var(x) => match bound.iter().rposition(|y| y == x) {
                Some(k) => {
                    let _ = write!(s, "#{}", bound.len() - 1 - k);
                }
                None => {
                    let _ = write!(s, "v:{x};");
                }
            },
            Const(x) => {
                let _ = write!(s, "c:{x};");
            }
            Proj1(a) | Proj2(a) | Box(a) => {
                s.push_str(match self {
                    Proj1(_) => "(p1 ",
                    Proj2(_) => "(p2 ",
                    _ => "(box ",
                });
                a.write_key(bound, s);
                s.push(')');
            }
            Lam(x, t, b) => bin("lam", x, t, b, bound, s),
            Forall(x, t, b) => bin("all", x, t, b, bound, s),
            Exists(x, t, b) => bin("ex", x, t, b, bound, s),
            Comprehension(x, t, b) => bin("set", x, t, b, bound, s),
            Pair(a, b) | App(a, b) | And(a, b) | Or(a, b) | Implies(a, b) | Member(a, b) | Eq(_, a, b) => {
                let tag = match self {
                    Pair(..) => "(pair ".to_string(),
                    App(..) => "(app ".to_string(),
                    And(..) => "(and ".to_string(),
                    Or(..) => "(or ".to_string(),
                    Implies(..) => "(imp ".to_string(),
                    Member(..) => "(in ".to_string(),
                    Eq(t, ..) => format!("(eq {t:?} "),
                    _ => unreachable!(),
                };
                s.push_str(&tag);
                a.write_key(bound, s);
                s.push(' ');
                b.write_key(bound, s);
                s.push(')');
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.alpha_key() == other.alpha_key()
    }
}

/// Ordered typed variables with unique names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    vars: Vec<(String, Type)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    /// Fails on a repeated name.
    pub fn from_vars(vars: Vec<(String, Type)>) -> Result<Context, String> {
        let mut seen = BTreeSet::new();
        for (x, _) in &vars {
            if !seen.insert(x.clone()) {
                return Err(x.clone());
            }
        }
        Ok(Context { vars })
    }

    pub fn vars(&self) -> &[(String, Type)] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn lookup(&self, x: &str) -> Option<(usize, &Type)> {
        self.vars.iter().rposition(|(y, _)| y == x).map(|k| (k, &self.vars[k].1))
    }

    /// Appends a variable, shadowing any earlier one of the same name.
    pub fn push(&mut self, x: &str, ty: Type) {
        self.vars.push((x.to_string(), ty));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn extended(&self, x: &str, ty: Type) -> Context {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    pub fn without(&self, x: &str) -> Context {
        Context {
            vars: self.vars.iter().filter(|(y, _)| y != x).cloned().collect(),
        }
    }

    pub fn types(&self) -> Vec<Type> {
        self.vars.iter().map(|(_, t)| t.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequent {
    pub context: Context,
    pub lhs: Term,
    pub rhs: Term,
}

impl Sequent {
    pub fn new(context: Context, lhs: Term, rhs: Term) -> Sequent {
        Sequent { context, lhs, rhs }
    }
}

/// Base types and typed constants in scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    pub types: BTreeSet<String>,
    pub consts: BTreeMap<String, Type>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub sequent: Sequent,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
}
