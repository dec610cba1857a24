use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    One,
    Fun,
    Forall,
    Exists,
    BoxKw,
    Top,
    Bot,
    In,
    P1,
    P2,
    Star,
    Caret,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    Bar,
    Turnstile,
    Iff,
    Arrow,
    Eq,
    EqSub,
    And,
    Or,
    Tilde,
    At,
    /// Section header `types:` / `consts:` / `axioms:`.
    Section(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Section(s) => format!("section `{s}:`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::One => "1",
            Tok::Fun => "fun",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::BoxKw => "box",
            Tok::Top => "top",
            Tok::Bot => "bot",
            Tok::In => "in",
            Tok::P1 => "p1",
            Tok::P2 => "p2",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Turnstile => "|-",
            Tok::Iff => "<=>",
            Tok::Arrow => "=>",
            Tok::Eq => "=",
            Tok::EqSub => "=_",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Tilde => "~",
            Tok::At => "@",
            Tok::Ident(_) | Tok::Section(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn is_keyword(s: &str) -> bool {
    matches!(s, "fun" | "forall" | "exists" | "box" | "top" | "bot" | "in" | "p1" | "p2")
}

/// Splits source text into tokens. `#` starts a comment running to the end
/// of the line. With `sections`, `types:`, `consts:` and `axioms:` at the
/// start of a token become section headers.
pub fn lex(src: &str, sections: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let sym: Option<(Tok, usize)> = if rest.starts_with("<=>") {
            Some((Tok::Iff, 3))
        } else if rest.starts_with("|-") {
            Some((Tok::Turnstile, 2))
        } else if rest.starts_with("=>") {
            Some((Tok::Arrow, 2))
        } else if rest.starts_with("=_") {
            Some((Tok::EqSub, 2))
        } else if rest.starts_with("/\\") {
            Some((Tok::And, 2))
        } else if rest.starts_with("\\/") {
            Some((Tok::Or, 2))
        } else {
            match c {
                '=' => Some((Tok::Eq, 1)),
                '*' => Some((Tok::Star, 1)),
                '^' => Some((Tok::Caret, 1)),
                '(' => Some((Tok::LParen, 1)),
                ')' => Some((Tok::RParen, 1)),
                '<' => Some((Tok::LAngle, 1)),
                '>' => Some((Tok::RAngle, 1)),
                '{' => Some((Tok::LBrace, 1)),
                '}' => Some((Tok::RBrace, 1)),
                '[' => Some((Tok::LBracket, 1)),
                ']' => Some((Tok::RBracket, 1)),
                ',' => Some((Tok::Comma, 1)),
                ':' => Some((Tok::Colon, 1)),
                ';' => Some((Tok::Semi, 1)),
                '.' => Some((Tok::Dot, 1)),
                '|' => Some((Tok::Bar, 1)),
                '~' => Some((Tok::Tilde, 1)),
                '@' => Some((Tok::At, 1)),
                _ => None,
            }
        };
        if let Some((tok, n)) = sym {
            out.push(Token { tok, line: tl, col: tc });
            i += n;
            col += n;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if sections && matches!(word.as_str(), "types" | "consts" | "axioms") && chars.get(i) == Some(&':') {
                i += 1;
                col += 1;
                out.push(Token {
                    tok: Tok::Section(word),
                    line: tl,
                    col: tc,
                });
                continue;
            }
            let tok = match word.as_str() {
                "1" => Tok::One,
                "fun" => Tok::Fun,
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "box" => Tok::BoxKw,
                "top" => Tok::Top,
                "bot" => Tok::Bot,
                "in" => Tok::In,
                "p1" => Tok::P1,
                "p2" => Tok::P2,
                _ if word.chars().next().is_some_and(|c| c.is_ascii_digit()) => {
                    return Err(ParseError::new(tl, tc, format!("unexpected number `{word}`")));
                }
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, line: tl, col: tc });
            continue;
        }
        return Err(ParseError::new(tl, tc, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
