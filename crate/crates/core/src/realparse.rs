//! Parser for exact real expressions.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | "sqrt" "(" posint ")" | "(" expr ")" | '-' factor
//! rational := integer ("/" posint)?
//! ```
//!
//! `*` binds tighter than `+`/`-`, both are left associative, and unary
//! minus binds tighter than `*`. The Unicode minus sign `−` is accepted
//! wherever `-` is. Only rational literals carry `/`; there is no division
//! between irrational subexpressions.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactnum::{normalize_radicand, Rational, RealElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("domain error at position {position}: {message}")]
    Domain { position: usize, message: String },
    #[error("division by zero at position {position}")]
    DivisionByZero { position: usize },
}

impl ParseError {
    /// Character offset of the error in the input.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::Domain { position, .. }
            | ParseError::DivisionByZero { position } => *position,
        }
    }
}

/// Parse tree, kept so callers can inspect what was written before it is
/// folded into a canonical [`RealElement`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Rational(Rational),
    Sqrt(u64),
    Sum(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Negation(Box<Expr>),
}

impl Expr {
    pub fn evaluate(&self) -> RealElement {
        match self {
            Expr::Rational(q) => RealElement::from_rational(q.clone()),
            Expr::Sqrt(n) => {
                let (s, m) = normalize_radicand(*n);
                RealElement::surd(Rational::from_integer(BigInt::from(s)), m)
            }
            Expr::Sum(a, b) => a.evaluate() + b.evaluate(),
            Expr::Difference(a, b) => a.evaluate() - b.evaluate(),
            Expr::Product(a, b) => a.evaluate() * b.evaluate(),
            Expr::Negation(a) => -a.evaluate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Sqrt => "'sqrt'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((Tok::Int(digits.parse().expect("ascii digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word != "sqrt" {
                    return Err(ParseError::Syntax {
                        position: start,
                        expected: "number, 'sqrt', '(' or '-'".into(),
                        found: format!("identifier '{word}'"),
                    });
                }
                out.push((Tok::Sqrt, start));
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "number, operator or parenthesis".into(),
                    found: format!("character '{other}'"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
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
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Sum(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Difference(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Product(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let at = self.offset();
                    let Tok::Int(d) = self.peek().clone() else {
                        return Err(self.error("positive integer denominator"));
                    };
                    self.bump();
                    if d.is_zero() {
                        return Err(ParseError::DivisionByZero { position: at });
                    }
                    Ok(Expr::Rational(Rational::new(n, d)))
                } else {
                    Ok(Expr::Rational(Rational::from_integer(n)))
                }
            }
            Tok::Sqrt => {
                self.bump();
                self.expect(Tok::LParen, "'(' after 'sqrt'")?;
                let at = self.offset();
                let radicand = match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        n
                    }
                    Tok::Minus => {
                        return Err(ParseError::Domain {
                            position: at,
                            message: "square root of a negative number".into(),
                        })
                    }
                    _ => return Err(self.error("positive integer radicand")),
                };
                self.expect(Tok::RParen, "')' closing 'sqrt('")?;
                if !radicand.is_positive() {
                    return Err(ParseError::Domain {
                        position: at,
                        message: "radicand must be a positive integer".into(),
                    });
                }
                let n: u64 = radicand.try_into().map_err(|_| ParseError::Domain {
                    position: at,
                    message: "radicand exceeds 64 bits".into(),
                })?;
                Ok(Expr::Sqrt(n))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Negation(Box::new(self.factor()?)))
            }
            _ => Err(self.error("number, 'sqrt', '(' or '-'")),
        }
    }
}

/// Parses `text` into its syntax tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}

/// Parses `text` into a canonical [`RealElement`].
pub fn parse(text: &str) -> Result<RealElement, ParseError> {
    parse_expr(text).map(|e| e.evaluate())
}
