//! Recursive-descent parser for the ASCII concrete syntax.
//!
//! ```text
//! formula := quant | bin
//! quant   := ("forall" | "exists") var "." formula
//! bin     := unary (("&" | "|" | "->" | "<->") unary)*
//! unary   := "~" unary | "(" formula ")" | quant | atom
//! atom    := var ("in" | "=") var
//! var     := ident (":" nat)?
//! ```
//!
//! Binary operators are left-associative with precedence `&` > `|` > `->` > `<->`.
//! A quantifier in operand position extends as far to the right as possible.

use super::{Formula, TypeError, TypedFormula, TypedVar};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected one of {expected:?}, found {found}")]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("variable `{name}` at byte {offset} needs a type annotation `{name}:n`")]
    MissingType { name: String, offset: usize },
    #[error("variable `{name}` at byte {offset} has a type annotation in an untyped formula")]
    UnexpectedType { name: String, offset: usize },
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("free variable {name} in a sentence")]
    FreeVariable { name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Forall,
    Exists,
    In,
    Eq,
    Colon,
    Dot,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Iff,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::End => "end of input".to_owned(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::In => "in",
            Tok::Eq => "=",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Not => "~",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::Ident(_) | Tok::Nat(_) | Tok::End => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'.' => Tok::Dot,
            b':' => Tok::Colon,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let n = digits.parse::<u32>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: vec!["type index fitting in 32 bits"],
                    found: digits.to_owned(),
                })?;
                Tok::Nat(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                match &text[start..=i] {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "in" => Tok::In,
                    word => Tok::Ident(word.to_owned()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax { offset: start, expected: vec!["token"], found: format!("`{ch}`") });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// A variable as written: name, optional type annotation, byte offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct RawVar {
    name: String,
    ty: Option<u32>,
    offset: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax { offset: self.offset(), expected, found: self.peek().describe() }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![tok.text()]))
        }
    }

    fn formula(&mut self) -> Result<Formula<RawVar>, ParseError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quant(),
            _ => self.iff(),
        }
    }

    fn quant(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let universal = self.bump() == Tok::Forall;
        let v = self.var()?;
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(if universal { Formula::Forall(v, Box::new(body)) } else { Formula::Exists(v, Box::new(body)) })
    }

    fn iff(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let mut lhs = self.or()?;
        while *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.or()?;
            lhs = Formula::Implies(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula<RawVar>, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Forall | Tok::Exists => self.quant(),
            Tok::Ident(_) => self.atom(),
            _ => Err(self.error(vec!["~", "(", "forall", "exists", "identifier"])),
        }
    }

    fn atom(&mut self) -> Result<Formula<RawVar>, ParseError> {
        let x = self.var()?;
        let membership = match self.peek() {
            Tok::In => true,
            Tok::Eq => false,
            _ => return Err(self.error(vec!["in", "="])),
        };
        self.bump();
        let y = self.var()?;
        Ok(if membership { Formula::Mem(x, y) } else { Formula::Eq(x, y) })
    }

    fn var(&mut self) -> Result<RawVar, ParseError> {
        let offset = self.offset();
        let name = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(vec!["identifier"])),
        };
        self.bump();
        let ty = if *self.peek() == Tok::Colon {
            self.bump();
            match self.bump() {
                Tok::Nat(n) => Some(n),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(vec!["type index"]));
                }
            }
        } else {
            None
        };
        Ok(RawVar { name, ty, offset })
    }
}

impl std::fmt::Display for RawVar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.ty {
            Some(t) => write!(f, "{}:{}", self.name, t),
            None => f.write_str(&self.name),
        }
    }
}

fn parse_raw(text: &str) -> Result<Formula<RawVar>, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(vec!["&", "|", "->", "<->", "end of input"]));
    }
    Ok(f)
}

fn convert<W: super::Variable>(
    f: &Formula<RawVar>,
    conv: &impl Fn(&RawVar) -> Result<W, ParseError>,
) -> Result<Formula<W>, ParseError> {
    Ok(match f {
        Formula::Mem(x, y) => Formula::Mem(conv(x)?, conv(y)?),
        Formula::Eq(x, y) => Formula::Eq(conv(x)?, conv(y)?),
        Formula::Not(g) => Formula::not(convert(g, conv)?),
        Formula::And(a, b) => Formula::and(convert(a, conv)?, convert(b, conv)?),
        Formula::Or(a, b) => Formula::or(convert(a, conv)?, convert(b, conv)?),
        Formula::Implies(a, b) => Formula::implies(convert(a, conv)?, convert(b, conv)?),
        Formula::Iff(a, b) => Formula::iff(convert(a, conv)?, convert(b, conv)?),
        Formula::Forall(x, g) => Formula::forall(conv(x)?, convert(g, conv)?),
        Formula::Exists(x, g) => Formula::exists(conv(x)?, convert(g, conv)?),
    })
}

/// Parses a formula of the untyped language. Shadowed binders are renamed.
pub fn parse_untyped(text: &str) -> Result<Formula, ParseError> {
    let raw = parse_raw(text)?;
    let f = convert(&raw, &|v: &RawVar| match v.ty {
        None => Ok(v.name.clone()),
        Some(_) => Err(ParseError::UnexpectedType { name: v.name.clone(), offset: v.offset }),
    })?;
    Ok(f.rename_shadowed())
}

/// Parses a formula of the typed language and checks its atoms.
///
/// Binders must carry a type. A bare occurrence takes the type of the
/// innermost binder of that name; free occurrences must be annotated.
pub fn parse_typed(text: &str) -> Result<TypedFormula, ParseError> {
    let raw = parse_raw(text)?;
    let f = type_scoped(&raw, &mut Vec::new())?;
    f.check_types()?;
    Ok(f.rename_shadowed())
}

fn type_scoped(f: &Formula<RawVar>, scope: &mut Vec<TypedVar>) -> Result<TypedFormula, ParseError> {
    let resolve = |v: &RawVar, scope: &[TypedVar]| match v.ty {
        Some(ty) => Ok(TypedVar { name: v.name.clone(), ty }),
        None => scope
            .iter()
            .rev()
            .find(|b| b.name == v.name)
            .cloned()
            .ok_or_else(|| ParseError::MissingType { name: v.name.clone(), offset: v.offset }),
    };
    Ok(match f {
        Formula::Mem(x, y) => Formula::Mem(resolve(x, scope)?, resolve(y, scope)?),
        Formula::Eq(x, y) => Formula::Eq(resolve(x, scope)?, resolve(y, scope)?),
        Formula::Not(g) => Formula::not(type_scoped(g, scope)?),
        Formula::And(a, b) => Formula::and(type_scoped(a, scope)?, type_scoped(b, scope)?),
        Formula::Or(a, b) => Formula::or(type_scoped(a, scope)?, type_scoped(b, scope)?),
        Formula::Implies(a, b) => Formula::implies(type_scoped(a, scope)?, type_scoped(b, scope)?),
        Formula::Iff(a, b) => Formula::iff(type_scoped(a, scope)?, type_scoped(b, scope)?),
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            let Some(ty) = x.ty else {
                return Err(ParseError::MissingType { name: x.name.clone(), offset: x.offset });
            };
            let var = TypedVar { name: x.name.clone(), ty };
            scope.push(var.clone());
            let body = type_scoped(g, scope);
            scope.pop();
            if matches!(f, Formula::Forall(..)) {
                Formula::forall(var, body?)
            } else {
                Formula::exists(var, body?)
            }
        }
    })
}

fn require_sentence<V: super::Variable>(f: Formula<V>) -> Result<Formula<V>, ParseError> {
    match f.free_variables().into_iter().next() {
        Some(v) => Err(ParseError::FreeVariable { name: v.to_string() }),
        None => Ok(f),
    }
}

pub fn parse_untyped_sentence(text: &str) -> Result<Formula, ParseError> {
    require_sentence(parse_untyped(text)?)
}

pub fn parse_typed_sentence(text: &str) -> Result<TypedFormula, ParseError> {
    require_sentence(parse_typed(text)?)
}
