//! Recursive-descent parser. Precedence from loosest to tightest:
//! binders, `<=>`, `=>` (right), `\/`, `/\`, `=`/`=_A`/`in`, prefix
//! `box`/`~`, `@` (left), `p1`/`p2`, atoms. Binders extend as far right as
//! possible. Types: `*` (left) is looser than `^` (right).

use super::ast::{Axiom, Context, Sequent, Signature, Term, Theory, Type};
use super::lexer::{lex, Tok, Token};
use super::ParseError;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src, false)?,
            pos: 0,
        })
    }

    fn with_sections(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src, true)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.line, t.col, msg)
    }

    fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", want.describe(), self.peek().describe())))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.error(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }

    pub fn ty(&mut self) -> Result<Type, ParseError> {
        let mut t = self.exp_ty()?;
        while *self.peek() == Tok::Star {
            self.next();
            t = Type::prod(t, self.exp_ty()?);
        }
        Ok(t)
    }

    fn exp_ty(&mut self) -> Result<Type, ParseError> {
        let t = self.atom_ty()?;
        if *self.peek() == Tok::Caret {
            self.next();
            return Ok(Type::exp(t, self.exp_ty()?));
        }
        Ok(t)
    }

    fn atom_ty(&mut self) -> Result<Type, ParseError> {
        let t = match self.peek().clone() {
            Tok::One => Type::Unit,
            Tok::Ident(s) if s == "P" => Type::Prop,
            Tok::Ident(s) => Type::Base(s),
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            other => return Err(self.error(format!("expected a type, found {}", other.describe()))),
        };
        self.next();
        Ok(t)
    }

    pub fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Fun | Tok::Forall | Tok::Exists => self.binder(),
            _ => self.iff(),
        }
    }

    fn binder(&mut self) -> Result<Term, ParseError> {
        let kw = self.next();
        let x = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        match kw {
            Tok::Fun => {
                self.expect(Tok::Arrow)?;
                Ok(Term::lam(&x, ty, self.term()?))
            }
            Tok::Forall => {
                self.expect(Tok::Dot)?;
                Ok(Term::forall(&x, ty, self.term()?))
            }
            _ => {
                self.expect(Tok::Dot)?;
                Ok(Term::exists(&x, ty, self.term()?))
            }
        }
    }

    fn iff(&mut self) -> Result<Term, ParseError> {
        let a = self.imp()?;
        if *self.peek() == Tok::Iff {
            self.next();
            let b = self.imp()?;
            return Ok(Term::iff(a, b));
        }
        Ok(a)
    }

    fn imp(&mut self) -> Result<Term, ParseError> {
        let a = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let b = match self.peek() {
                Tok::Fun | Tok::Forall | Tok::Exists => self.binder()?,
                _ => self.imp()?,
            };
            return Ok(Term::implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self) -> Result<Term, ParseError> {
        let mut a = self.and()?;
        while *self.peek() == Tok::Or {
            self.next();
            a = Term::or(a, self.and()?);
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Term, ParseError> {
        let mut a = self.rel()?;
        while *self.peek() == Tok::And {
            self.next();
            a = Term::and(a, self.rel()?);
        }
        Ok(a)
    }

    fn rel(&mut self) -> Result<Term, ParseError> {
        let a = self.prefix()?;
        match self.peek() {
            Tok::Eq => {
                self.next();
                Ok(Term::eq(None, a, self.prefix()?))
            }
            Tok::EqSub => {
                self.next();
                let ty = self.atom_ty()?;
                Ok(Term::eq(Some(ty), a, self.prefix()?))
            }
            Tok::In => {
                self.next();
                Ok(Term::Member(Box::new(a), Box::new(self.prefix()?)))
            }
            _ => Ok(a),
        }
    }

    fn prefix(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::BoxKw => {
                self.next();
                Ok(Term::boxed(self.prefix()?))
            }
            Tok::Tilde => {
                self.next();
                Ok(Term::not(self.prefix()?))
            }
            _ => self.app(),
        }
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut a = self.unary()?;
        while *self.peek() == Tok::At {
            self.next();
            a = Term::app(a, self.unary()?);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::P1 => {
                self.next();
                Ok(Term::proj1(self.unary()?))
            }
            Tok::P2 => {
                self.next();
                Ok(Term::proj2(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Star => {
                self.next();
                Ok(Term::Star)
            }
            Tok::Top => {
                self.next();
                Ok(Term::Top)
            }
            Tok::Bot => {
                self.next();
                Ok(Term::Bot)
            }
            Tok::Ident(x) => {
                self.next();
                Ok(Term::Var(x))
            }
            Tok::LParen => {
                self.next();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LAngle => {
                self.next();
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RAngle)?;
                Ok(Term::pair(a, b))
            }
            Tok::LBrace => {
                self.next();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Bar)?;
                let body = self.term()?;
                self.expect(Tok::RBrace)?;
                Ok(Term::Comprehension(x, ty, Box::new(body)))
            }
            Tok::Fun | Tok::Forall | Tok::Exists => self.binder(),
            other => Err(self.error(format!("expected a term, found {}", other.describe()))),
        }
    }

    /// `x:A, y:B` up to (not including) the token that ends it.
    pub fn context(&mut self) -> Result<Context, ParseError> {
        let mut vars = Vec::new();
        loop {
            let x = self.ident()?;
            self.expect(Tok::Colon)?;
            vars.push((x, self.ty()?));
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                break;
            }
        }
        Context::from_vars(vars).map_err(|x| self.error(format!("variable `{x}` declared twice")))
    }

    fn starts_context(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Colon
    }

    pub fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let context = if self.starts_context() {
            let c = self.context()?;
            self.expect(Tok::Bar)?;
            c
        } else {
            Context::new()
        };
        let lhs = self.term()?;
        self.expect(Tok::Turnstile)?;
        let rhs = self.term()?;
        Ok(Sequent { context, lhs, rhs })
    }
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_sequent(src: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(src)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

/// A context on its own, e.g. `f:G^G, g:G^G`. The empty string is the
/// empty context.
pub fn parse_context(src: &str) -> Result<Context, ParseError> {
    let mut p = Parser::new(src)?;
    if p.at_eof() {
        return Ok(Context::new());
    }
    let c = p.context()?;
    p.finish()?;
    Ok(c)
}

/// Theory file: sections `types:` (names), `consts:` (`name : Type`
/// entries) and `axioms:` (`[name] sequent ;` entries), in any order.
pub fn parse_theory(src: &str) -> Result<Theory, ParseError> {
    let mut p = Parser::with_sections(src)?;
    let mut th = Theory {
        signature: Signature::default(),
        axioms: Vec::new(),
    };
    let mut count = 0;
    loop {
        let head = p.peek().clone();
        if head == Tok::Eof {
            break;
        }
        if !matches!(head, Tok::Section(_)) {
            return Err(p.error(format!(
                "expected `types:`, `consts:` or `axioms:`, found {}",
                head.describe()
            )));
        }
        p.next();
        match head {
            Tok::Section(s) if s == "types" => {
                while let Tok::Ident(_) = p.peek() {
                    let line = p.line();
                    let name = p.ident()?;
                    if name == "P" {
                        return Err(ParseError::new(line, 0, "`P` is the type of propositions"));
                    }
                    th.signature.types.insert(name);
                    if matches!(p.peek(), Tok::Comma | Tok::Semi) {
                        p.next();
                    }
                }
            }
            Tok::Section(s) if s == "consts" => {
                while let Tok::Ident(_) = p.peek() {
                    let name = p.ident()?;
                    p.expect(Tok::Colon)?;
                    let ty = p.ty()?;
                    if th.signature.consts.insert(name.clone(), ty).is_some() {
                        return Err(p.error(format!("constant `{name}` declared twice")));
                    }
                    if matches!(p.peek(), Tok::Comma | Tok::Semi) {
                        p.next();
                    }
                }
            }
            Tok::Section(_) => loop {
                match p.peek() {
                    Tok::Eof | Tok::Section(_) => break,
                    _ => {}
                }
                let line = p.line();
                count += 1;
                let name = if *p.peek() == Tok::LBracket {
                    p.next();
                    let n = p.ident()?;
                    p.expect(Tok::RBracket)?;
                    n
                } else {
                    format!("axiom{count}")
                };
                let sequent = p.sequent()?;
                p.expect(Tok::Semi)?;
                th.axioms.push(Axiom { name, sequent, line });
            },
            _ => unreachable!("checked above"),
        }
    }
    Ok(th)
}
