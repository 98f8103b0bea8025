use super::{Name, Prim, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Eq,
    Comma,
    Let,
    Letrec,
    In,
    Cons,
    Car,
    Cdr,
    Prim(Prim),
    Int(i64),
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lambda => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Let => "`let`".into(),
            Tok::Letrec => "`letrec`".into(),
            Tok::In => "`in`".into(),
            Tok::Cons => "`cons`".into(),
            Tok::Car => "`car`".into(),
            Tok::Cdr => "`cdr`".into(),
            Tok::Prim(p) => format!("`{p}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("name `{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Lambda),
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Eq),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            advance(1, &mut i);
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        let negative = c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
        if c.is_ascii_digit() || negative {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[start..j].iter().collect();
            let n = text.parse::<i64>().map_err(|_| SyntaxError::IntOutOfRange {
                line: l0,
                col: c0,
                text: text.clone(),
            })?;
            advance(j - start, &mut i);
            out.push(Spanned { tok: Tok::Int(n), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[start..j].iter().collect();
            advance(j - start, &mut i);
            let tok = match text.as_str() {
                "let" => Tok::Let,
                "letrec" => Tok::Letrec,
                "in" => Tok::In,
                "cons" => Tok::Cons,
                "car" => Tok::Car,
                "cdr" => Tok::Cdr,
                "add1" => Tok::Prim(Prim::Add1),
                "sub1" => Tok::Prim(Prim::Sub1),
                _ => Tok::Ident(text),
            };
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        return Err(SyntaxError::Unexpected {
            line: l0,
            col: c0,
            expected: "a term".into(),
            found: format!("character `{c}`"),
        });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let s = &self.toks[self.pos];
        SyntaxError::Unexpected {
            line: s.line,
            col: s.col,
            expected: expected.into(),
            found: s.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&tok.describe()))
        }
    }

    fn name(&mut self) -> Result<Name, SyntaxError> {
        let s = self.toks[self.pos].clone();
        match &s.tok {
            Tok::Ident(text) => {
                self.bump();
                Name::from_ident(text).map_err(|_| SyntaxError::Unexpected {
                    line: s.line,
                    col: s.col,
                    expected: "a name".into(),
                    found: s.tok.describe(),
                })
            }
            _ => Err(self.error("a name")),
        }
    }

    fn starts_open(&self) -> bool {
        matches!(self.peek(), Tok::Lambda | Tok::Let | Tok::Letrec)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::LParen | Tok::Cons | Tok::Car | Tok::Cdr | Tok::Prim(_)
        )
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        if self.starts_open() {
            return self.open();
        }
        let mut head = self.atom()?;
        loop {
            if self.starts_atom() {
                let arg = self.atom()?;
                head = Term::app(head, arg);
            } else if self.starts_open() {
                let arg = self.open()?;
                return Ok(Term::app(head, arg));
            } else {
                return Ok(head);
            }
        }
    }

    /// Forms that extend as far right as possible.
    fn open(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let x = self.name()?;
                self.expect(Tok::Dot)?;
                Ok(Term::lam(x, self.term()?))
            }
            Tok::Let => {
                self.bump();
                let x = self.name()?;
                self.expect(Tok::Eq)?;
                let rhs = self.term()?;
                self.expect(Tok::In)?;
                Ok(Term::let_(x, rhs, self.term()?))
            }
            Tok::Letrec => {
                self.bump();
                let mut bindings: Vec<(Name, Term)> = Vec::new();
                loop {
                    let at = self.toks[self.pos].clone();
                    let x = self.name()?;
                    if bindings.iter().any(|(y, _)| *y == x) {
                        return Err(SyntaxError::DuplicateBinding {
                            line: at.line,
                            col: at.col,
                            name: x.to_string(),
                        });
                    }
                    self.expect(Tok::Eq)?;
                    let rhs = self.term()?;
                    bindings.push((x, rhs));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::In)?;
                Ok(Term::letrec(bindings, self.term()?))
            }
            _ => Err(self.error("a term")),
        }
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(_) => Ok(Term::Var(self.name()?)),
            Tok::Int(n) => {
                self.bump();
                Ok(Term::IntConst(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Cons => {
                self.bump();
                let a = self.atom()?;
                let b = self.atom()?;
                Ok(Term::cons(a, b))
            }
            Tok::Car => {
                self.bump();
                Ok(Term::car(self.atom()?))
            }
            Tok::Cdr => {
                self.bump();
                Ok(Term::cdr(self.atom()?))
            }
            Tok::Prim(p) => {
                self.bump();
                Ok(Term::prim(p, self.atom()?))
            }
            _ => Err(self.error("a term")),
        }
    }
}

/// Parses a term. Application is left-associative, and a lambda, `let` or
/// `letrec` body extends as far right as possible. An application may end
/// in one of those forms without parentheses, as in `(\x.x) \y.y`.
pub fn parse(source: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser { toks: lex(source)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of input"));
    }
    Ok(t)
}
