//! Polynomial text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Whitespace is insignificant and implicit multiplication is rejected.

use num_bigint::BigInt;

use super::form::{HomogeneousForm, SparsePoly};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(s),
                line: l0,
                column: c0,
            });
            continue;
        } else {
            match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(Error::Parse {
                        line,
                        column,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            }
        };
        out.push(Spanned {
            tok,
            line: l0,
            column: c0,
        });
        i += 1;
        column += 1;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<SparsePoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return self.err("implicit multiplication is not allowed, write '*'")
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SparsePoly> {
        match self.peek().tok {
            Tok::Minus => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<SparsePoly> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.pos += 1;
        let e = match &self.peek().tok {
            Tok::Int(n) => match u32::try_from(n.clone()) {
                Ok(e) if e <= 1 << 16 => e,
                _ => return self.err("exponent too large"),
            },
            _ => return self.err("expected a nonnegative integer exponent"),
        };
        self.pos += 1;
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<SparsePoly> {
        let nv = self.vars.len();
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(SparsePoly::constant(nv, n))
            }
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(SparsePoly::variable(nv, i))
                }
                None => self.err(format!(
                    "unknown variable '{name}' (expected one of {})",
                    self.vars.join(", ")
                )),
            },
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a number, variable or '('"),
        }
    }
}

/// Parses a polynomial in the given variables.
pub fn parse_polynomial(text: &str, vars: &[String]) -> Result<SparsePoly> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vars,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a homogeneous form; inhomogeneous input is rejected.
pub fn parse_form(text: &str, vars: &[String]) -> Result<HomogeneousForm> {
    let p = parse_polynomial(text, vars)?;
    if p.is_zero() {
        return Err(Error::invalid(format!("'{text}' is the zero polynomial")));
    }
    HomogeneousForm::from_sparse(&p)
}

/// Parses a binary form in `(vars[0], vars[1])`. A polynomial in the first
/// variable alone is homogenized with respect to the second.
pub fn parse_binary_form(text: &str, vars: &[String]) -> Result<HomogeneousForm> {
    if vars.len() != 2 {
        return Err(Error::invalid("binary forms need exactly two variables"));
    }
    let p = parse_polynomial(text, vars)?;
    let (lo, hi) = p
        .degree_range()
        .ok_or_else(|| Error::invalid(format!("'{text}' is the zero polynomial")))?;
    if lo == hi {
        return HomogeneousForm::from_sparse(&p);
    }
    p.homogenize_last(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::form::default_var_names;

    fn xy() -> Vec<String> {
        default_var_names(2)
    }

    #[test]
    fn precedence_and_unary() {
        let f = parse_form("-x^2 + 3*x*y - (y - x)*(y + x)", &xy()).unwrap();
        assert_eq!(f, HomogeneousForm::from_binary_i64(2, &[-1, 3, 0]));
        let g = parse_form("2*x - -y", &xy()).unwrap();
        assert_eq!(g, HomogeneousForm::from_binary_i64(1, &[1, 2]));
    }

    #[test]
    fn errors_report_position() {
        match parse_polynomial("x +\n  3 x", &xy()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
        match parse_polynomial("x + w", &xy()) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 5)),
            other => panic!("{other:?}"),
        }
        assert!(parse_polynomial("x^-1", &xy()).is_err());
        assert!(parse_polynomial("(x + y", &xy()).is_err());
        assert!(parse_polynomial("x $ y", &xy()).is_err());
        assert!(parse_form("x^2 + y", &xy()).is_err());
    }

    #[test]
    fn binary_form_homogenizes() {
        let f = parse_binary_form("x^2 - x - 1", &xy()).unwrap();
        assert_eq!(f, HomogeneousForm::from_binary_i64(2, &[-1, -1, 1]));
    }
}
