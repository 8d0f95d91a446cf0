//! Parser for the phase-space expression language.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("+" | "-") unary | power ;
//! power   = atom [ "^" exponent ] ;
//! exponent= [ "-" ] integer | "(" [ "-" ] integer ")" ;
//! atom    = integer | identifier | "(" expr ")" ;
//! ```
//!
//! Identifiers: `lambda`, `x`, `y`, `z`, `p_lambda`, `p_x`, `p_y`, `p_z`,
//! `a`, `m` (`λ` and `p_λ` are accepted as aliases).

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::expr::PhaseExpr;
use super::poly::{Poly, Var};

const MAX_EXPONENT: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
    #[error("exponent must be an integer with |e| <= {MAX_EXPONENT}")]
    BadExponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {pos}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == 'λ'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == 'λ'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                let mut end = pos;
                while let Some(&(i, ch)) = it.peek() {
                    if !ch.is_ascii_digit() {
                        break;
                    }
                    end = i + ch.len_utf8();
                    it.next();
                }
                let n: BigInt = text[pos..end].parse().expect("ascii digits");
                out.push((Tok::Int(n), pos));
                continue;
            }
            s if is_ident_start(s) => {
                let mut end = pos;
                while let Some(&(i, ch)) = it.peek() {
                    if !is_ident_char(ch) {
                        break;
                    }
                    end = i + ch.len_utf8();
                    it.next();
                }
                out.push((Tok::Ident(text[pos..end].to_string()), pos));
                continue;
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(other),
                    pos,
                })
            }
        };
        out.push((tok, pos));
        it.next();
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            pos: self.pos(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.describe())),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expr(&mut self) -> Result<PhaseExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PhaseExpr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).ok_or(ParseError {
                        kind: ParseErrorKind::DivisionByZero,
                        pos,
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<PhaseExpr, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PhaseExpr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let e = self.exponent()?;
        base.pow(e).ok_or(ParseError {
            kind: ParseErrorKind::DivisionByZero,
            pos,
        })
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.peek() == Some(&Tok::LParen);
        if paren {
            self.bump();
        }
        let neg = self.peek() == Some(&Tok::Minus);
        if neg {
            self.bump();
        }
        let n = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => {
                self.at -= 1;
                return Err(self.unexpected());
            }
        };
        if paren {
            if self.peek() != Some(&Tok::RParen) {
                return Err(self.unexpected());
            }
            self.bump();
        }
        let n: i64 = n
            .try_into()
            .ok()
            .filter(|n: &i64| *n <= MAX_EXPONENT)
            .ok_or_else(|| self.err(ParseErrorKind::BadExponent))?;
        Ok(if neg { -(n as i32) } else { n as i32 })
    }

    fn atom(&mut self) -> Result<PhaseExpr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(PhaseExpr::from_poly(Poly::constant(
                BigRational::from_integer(n),
            ))),
            Some(Tok::Ident(name)) => match Var::from_name(&name) {
                Some(v) => Ok(PhaseExpr::var(v)),
                None => Err(ParseError {
                    kind: ParseErrorKind::UnknownIdentifier(name),
                    pos,
                }),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(e)
            }
            _ => {
                self.at -= 1;
                Err(self.unexpected())
            }
        }
    }
}

/// Parses `text` into its normal form.
pub fn parse_expr(text: &str) -> Result<PhaseExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_constraint() {
        let c = parse_expr("x^2 + y^2 - z^2 + a^2").unwrap();
        assert_eq!(c.to_string(), "x^2 + y^2 - z^2 + a^2");
    }

    #[test]
    fn zero_and_commutativity() {
        assert!(parse_expr("0").unwrap().is_zero());
        assert!(parse_expr("x*(p_x) - (p_x)*x").unwrap().is_zero());
    }

    #[test]
    fn precedence_and_unary_minus() {
        assert_eq!(parse_expr("-x^2").unwrap(), -parse_expr("x*x").unwrap());
        assert_eq!(parse_expr("1/2*x").unwrap(), parse_expr("x/2").unwrap());
        assert_eq!(parse_expr("2^3").unwrap(), PhaseExpr::int(8));
        assert_eq!(parse_expr("a^(-2)").unwrap(), parse_expr("1/a^2").unwrap());
    }

    #[test]
    fn rational_printing() {
        let e = parse_expr("-1/(2*a^2)").unwrap();
        assert_eq!(e.to_string(), "-1/(2*a^2)");
        let f = parse_expr("(p_x^2 + p_y^2 - p_z^2)/(m*a^4)").unwrap();
        assert_eq!(f.to_string(), "(p_x^2 + p_y^2 - p_z^2)/(a^4*m)");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_expr("x + q").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(matches!(e.kind, ParseErrorKind::UnknownIdentifier(ref s) if s == "q"));

        let e = parse_expr("x / (y - y)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DivisionByZero);
        assert_eq!(e.pos, 4);

        let e = parse_expr("x + * y").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(matches!(parse_expr("(x").unwrap_err().kind, ParseErrorKind::UnexpectedEnd));
        assert!(matches!(parse_expr("x # y").unwrap_err().kind, ParseErrorKind::UnexpectedChar('#')));
        assert!(parse_expr("x^1000").is_err());
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(parse_expr("λ*p_λ").unwrap(), parse_expr("lambda*p_lambda").unwrap());
    }
}
