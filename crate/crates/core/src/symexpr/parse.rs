//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | symbol | '(' expr ')'
//! ```
//!
//! Symbols are `q1`, `p2`, `lq1` (multiplier `λ_{q1}`), `lp1`, `t1`, with
//! any number of leading `d` for time derivatives. Bare `q` and `p` mean
//! `q1` and `p1`. Division is only allowed by non-zero constants.

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{PolyExpr, Var};
use crate::scalar::rational_from_decimal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownSymbol(String),
    NonPolynomial(String),
    DivisionByZero,
    BadNumber(String),
    ExponentTooLarge(u64),
    DimensionMismatch { found: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: {kind:?}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

const MAX_EXPONENT: u64 = 64;
const FUNCTION_NAMES: &[&str] = &["sin", "cos", "tan", "exp", "log", "ln", "sqrt", "abs", "sinh", "cosh", "tanh"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    while k < bytes.len() {
        let (pos, ch) = bytes[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < bytes.len() && (bytes[k].1.is_ascii_digit() || bytes[k].1 == '.') {
                k += 1;
            }
            let s: String = bytes[start..k].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Num(s)));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = k;
            while k < bytes.len() && (bytes[k].1.is_alphanumeric() || bytes[k].1 == '_') {
                k += 1;
            }
            let s: String = bytes[start..k].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Ident(s)));
        } else if "+-*/^()".contains(ch) {
            out.push((pos, Tok::Op(ch)));
            k += 1;
        } else {
            return Err(ParseError {
                position: pos,
                kind: ParseErrorKind::UnexpectedChar(ch),
            });
        }
    }
    Ok(out)
}

/// Resolves a symbol name to a [`Var`].
pub fn parse_symbol(name: &str) -> Option<Var> {
    let dots = name.chars().take_while(|c| *c == 'd').count();
    let rest = &name[dots..];
    let (stem, digits) = rest.split_at(rest.find(|c: char| c.is_ascii_digit()).unwrap_or(rest.len()));
    let index: u16 = if digits.is_empty() {
        if stem == "q" || stem == "p" {
            1
        } else {
            return None;
        }
    } else {
        let i = digits.parse().ok()?;
        if i == 0 {
            return None;
        }
        i
    };
    let dots = u8::try_from(dots).ok()?;
    match stem {
        "q" => Some(Var::Q { i: index, dots }),
        "p" => Some(Var::P { i: index, dots }),
        "lq" => Some(Var::LamQ { i: index, dots }),
        "lp" => Some(Var::LamP { i: index, dots }),
        "t" if dots == 0 => Some(Var::T(index)),
        _ => None,
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    k: usize,
    end: usize,
}

type P = PolyExpr<BigRational>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.k).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos(), kind })
    }

    fn expr(&mut self) -> Result<P, ParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let c = *c;
            self.k += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<P, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let c = *c;
            let op_pos = self.pos();
            self.k += 1;
            let rhs = self.unary()?;
            if c == '*' {
                acc = &acc * &rhs;
            } else {
                if !rhs.is_constant() {
                    return Err(ParseError {
                        position: op_pos,
                        kind: ParseErrorKind::NonPolynomial("division by a non-constant".into()),
                    });
                }
                let d = rhs.constant_term();
                if d.is_zero() {
                    return Err(ParseError {
                        position: op_pos,
                        kind: ParseErrorKind::DivisionByZero,
                    });
                }
                acc = acc.scale(&d.recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<P, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.k += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.k += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<P, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.k += 1;
            let pos = self.pos();
            match self.peek().cloned() {
                Some(Tok::Num(s)) => {
                    self.k += 1;
                    if s.contains('.') {
                        return Err(ParseError {
                            position: pos,
                            kind: ParseErrorKind::NonPolynomial(format!("exponent {s}")),
                        });
                    }
                    let e: u64 = s.parse().map_err(|_| ParseError {
                        position: pos,
                        kind: ParseErrorKind::BadNumber(s.clone()),
                    })?;
                    if e > MAX_EXPONENT {
                        return Err(ParseError {
                            position: pos,
                            kind: ParseErrorKind::ExponentTooLarge(e),
                        });
                    }
                    Ok(base.pow(e as u32))
                }
                Some(Tok::Op('-')) | Some(Tok::Op('(')) | Some(Tok::Ident(_)) => Err(ParseError {
                    position: pos,
                    kind: ParseErrorKind::NonPolynomial("exponent must be a non-negative integer".into()),
                }),
                Some(t) => self.err(ParseErrorKind::UnexpectedToken(format!("{t:?}"))),
                None => self.err(ParseErrorKind::UnexpectedEnd),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<P, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(s)) => {
                self.k += 1;
                let r = rational_from_decimal(&s).ok_or(ParseError {
                    position: pos,
                    kind: ParseErrorKind::BadNumber(s),
                })?;
                Ok(P::constant(r))
            }
            Some(Tok::Ident(name)) => {
                self.k += 1;
                if FUNCTION_NAMES.contains(&name.as_str()) {
                    return Err(ParseError {
                        position: pos,
                        kind: ParseErrorKind::NonPolynomial(format!("function `{name}`")),
                    });
                }
                match parse_symbol(&name) {
                    Some(v) => Ok(P::var(v)),
                    None => Err(ParseError {
                        position: pos,
                        kind: ParseErrorKind::UnknownSymbol(name),
                    }),
                }
            }
            Some(Tok::Op('(')) => {
                self.k += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Op(')')) => {
                        self.k += 1;
                        Ok(inner)
                    }
                    Some(t) => {
                        let t = format!("{t:?}");
                        self.err(ParseErrorKind::UnexpectedToken(t))
                    }
                    None => self.err(ParseErrorKind::UnexpectedEnd),
                }
            }
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(format!("{t:?}"))),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }
}

/// Parses polynomial text over the rationals.
pub fn parse_polynomial(text: &str) -> Result<P, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        k: 0,
        end: text.len(),
    };
    let out = parser.expr()?;
    if parser.k != parser.toks.len() {
        let t = format!("{:?}", parser.toks[parser.k].1);
        return parser.err(ParseErrorKind::UnexpectedToken(t));
    }
    Ok(out)
}

/// Parses a Hamiltonian `H(q_1..q_n, p_1..p_n)`. Only undotted `q`/`p`
/// symbols are allowed. Returns the polynomial and the number of degrees of
/// freedom (inferred when `n` is `None`, at least 1).
pub fn parse_hamiltonian(text: &str, n: Option<usize>) -> Result<(P, usize), ParseError> {
    let poly = parse_polynomial(text)?;
    for v in poly.vars() {
        if !matches!(v, Var::Q { dots: 0, .. } | Var::P { dots: 0, .. }) {
            return Err(ParseError {
                position: text.find(&v.name()).unwrap_or(0),
                kind: ParseErrorKind::UnknownSymbol(v.name()),
            });
        }
    }
    let found = poly.max_dof().max(1);
    let dim = match n {
        Some(n) if found > n => {
            return Err(ParseError {
                position: 0,
                kind: ParseErrorKind::DimensionMismatch { found, expected: n },
            })
        }
        Some(n) => n,
        None => found,
    };
    Ok((poly, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Ring;

    #[test]
    fn oscillator() {
        let h = parse_polynomial("p1^2/2 + q1^2/2").unwrap();
        let expected = &P::var(Var::p(1)).pow(2).scale(&BigRational::from_ratio(1, 2))
            + &P::var(Var::q(1)).pow(2).scale(&BigRational::from_ratio(1, 2));
        assert_eq!(h, expected);
        assert_eq!(format!("{h}"), "1/2*q1^2 + 1/2*p1^2");
    }

    #[test]
    fn precedence() {
        let a = parse_polynomial("-q^2").unwrap();
        assert_eq!(a, -P::var(Var::q(1)).pow(2));
        let b = parse_polynomial("2*(q1 + p1)^2 - 0.5").unwrap();
        assert_eq!(b.num_terms(), 4);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_polynomial("q1 + cos(q1)").unwrap_err();
        assert_eq!(e.position, 5);
        assert!(matches!(e.kind, ParseErrorKind::NonPolynomial(_)));
        let e = parse_polynomial("q1 / p1").unwrap_err();
        assert_eq!(e.position, 3);
        let e = parse_polynomial("q1^-1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::NonPolynomial(_)));
        let e = parse_polynomial("x + 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol("x".into()));
        let e = parse_polynomial("q1 +").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_polynomial("q/0").unwrap_err().kind, ParseErrorKind::DivisionByZero);
        assert!(parse_polynomial("q1 $ 2").is_err());
    }

    #[test]
    fn hamiltonian_dimension() {
        assert_eq!(parse_hamiltonian("q1*p2", None).unwrap().1, 2);
        assert_eq!(parse_hamiltonian("3", None).unwrap().1, 1);
        assert!(parse_hamiltonian("q3", Some(2)).is_err());
        assert!(parse_hamiltonian("lq1", None).is_err());
    }
}
