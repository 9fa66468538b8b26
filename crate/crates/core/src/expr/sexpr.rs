//! Plain-text S-expression syntax, e.g. `(+ (* z1 (^ z0 2)) (exp z0))`.
//!
//! Atoms are numbers (`3`, `-3/4`, `0.5`, `1e-3`) or coordinate names
//! (`x`, `z0`, `zt0`, `xs`, `zs0`, `zts0`). Lists are `(+ ...)`, `(* ...)`,
//! `(- a)`, `(- a b ...)`, `(^ e n)` with a non-negative integer `n`, and
//! `(exp e)`. Decimal literals become floating constants; everything else
//! stays exact.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Coord, Expression};
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut atom: Option<(String, usize, usize)> = None;
    let flush = |atom: &mut Option<(String, usize, usize)>, out: &mut Vec<Spanned>| {
        if let Some((text, l, c)) = atom.take() {
            out.push(Spanned {
                token: Token::Atom(text),
                line: l,
                column: c,
            });
        }
    };
    for ch in src.chars() {
        match ch {
            '(' | ')' => {
                flush(&mut atom, &mut out);
                out.push(Spanned {
                    token: if ch == '(' { Token::Open } else { Token::Close },
                    line,
                    column,
                });
            }
            c if c.is_whitespace() => flush(&mut atom, &mut out),
            c => match &mut atom {
                Some((text, _, _)) => text.push(c),
                None => atom = Some((c.to_string(), line, column)),
            },
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    flush(&mut atom, &mut out);
    out
}

fn parse_coord(name: &str) -> Option<Coord> {
    let index = |rest: &str| -> Option<u8> {
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        rest.parse().ok()
    };
    match name {
        "x" => return Some(Coord::X),
        "xs" => return Some(Coord::XStar),
        _ => {}
    }
    // Longest prefix first so `zts1` is not read as `zt` + `s1`.
    if let Some(r) = name.strip_prefix("zts") {
        return index(r).map(Coord::ZTildeStar);
    }
    if let Some(r) = name.strip_prefix("zt") {
        return index(r).map(Coord::ZTilde);
    }
    if let Some(r) = name.strip_prefix("zs") {
        return index(r).map(Coord::ZStar);
    }
    if let Some(r) = name.strip_prefix('z') {
        return index(r).map(Coord::Z);
    }
    None
}

fn parse_number(text: &str) -> Option<Expression> {
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n).ok()?;
        let d = BigInt::from_str(d).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Expression::rational(Rational::new(n, d)));
    }
    if let Ok(n) = BigInt::from_str(text) {
        return Some(Expression::rational(Rational::from_integer(n)));
    }
    let starts_numeric = text
        .trim_start_matches(['-', '+'])
        .starts_with(|c: char| c.is_ascii_digit() || c == '.');
    if starts_numeric {
        if let Ok(x) = text.parse::<f64>() {
            if x.is_finite() {
                return Some(Expression::float(x));
            }
        }
    }
    None
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn next(&mut self) -> Result<Spanned> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| err(self.end.0, self.end.1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expression> {
        let t = self.next()?;
        match t.token {
            Token::Close => Err(err(t.line, t.column, "unexpected `)`")),
            Token::Atom(text) => parse_number(&text)
                .or_else(|| parse_coord(&text).map(Expression::var))
                .ok_or_else(|| err(t.line, t.column, format!("unknown atom `{text}`"))),
            Token::Open => {
                let head = self.next()?;
                let op = match head.token {
                    Token::Atom(op) => op,
                    _ => return Err(err(head.line, head.column, "expected an operator")),
                };
                let mut args = Vec::new();
                let mut raw = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        None => return Err(err(self.end.0, self.end.1, "missing `)`")),
                        Some(s) if s.token == Token::Close => {
                            self.pos += 1;
                            break;
                        }
                        Some(s) => {
                            raw.push(s.clone());
                            args.push(self.expr()?);
                        }
                    }
                }
                build(&op, args, &raw, head.line, head.column)
            }
        }
    }
}

fn build(
    op: &str,
    mut args: Vec<Expression>,
    raw: &[Spanned],
    line: usize,
    column: usize,
) -> Result<Expression> {
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(err(
                line,
                column,
                format!("`{op}` takes {n} argument(s), got {}", args.len()),
            ))
        }
    };
    match op {
        "+" => Ok(Expression::sum(args)),
        "*" => Ok(Expression::product(args)),
        "-" => match args.len() {
            0 => Err(err(line, column, "`-` needs at least one argument")),
            1 => Ok(args.pop().unwrap().neg()),
            _ => {
                let first = args.remove(0);
                Ok(Expression::sum(
                    std::iter::once(first).chain(args.into_iter().map(Expression::neg)),
                ))
            }
        },
        "exp" => {
            arity(1)?;
            Ok(Expression::exp(args.pop().unwrap()))
        }
        "^" => {
            arity(2)?;
            let n = match &raw[1].token {
                Token::Atom(text) => text.parse::<u32>().ok(),
                _ => None,
            }
            .ok_or_else(|| {
                err(
                    raw[1].line,
                    raw[1].column,
                    "exponent must be a non-negative integer literal",
                )
            })?;
            let base = args.swap_remove(0);
            Ok(Expression::pow(base, n))
        }
        _ => Err(err(line, column, format!("unknown operator `{op}`"))),
    }
}

/// Parses one expression; trailing input is an error.
pub fn parse(src: &str) -> Result<Expression> {
    let tokens = tokenize(src);
    let end = src.lines().enumerate().last().map_or((1, 1), |(i, l)| {
        (i + 1, l.chars().count() + 1)
    });
    let mut p = Parser { tokens, pos: 0, end };
    let e = p.expr()?;
    if let Some(extra) = p.tokens.get(p.pos) {
        return Err(err(extra.line, extra.column, "trailing input after expression"));
    }
    Ok(e)
}

impl FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

impl serde::Serialize for Expression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expression {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn parses_documented_example() {
        let e = parse("(+ (* z1 (^ z0 2)) (exp z0))").unwrap();
        let v: f64 = e.eval(&[(Coord::Z(0), 0.0), (Coord::Z(1), 5.0)]).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn round_trips_through_display() {
        for src in [
            "(+ (* z1 (^ z0 2)) (exp z0))",
            "(* -3/4 zt2 (exp (* 2 z0)))",
            "(+ 0.5 x xs zs1 zts0)",
            "(- z0 z1 3)",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src}");
        }
    }

    #[test]
    fn rational_literals_stay_exact() {
        let e = parse("(* 1/3 z0)").unwrap();
        let v: Rational = e.eval(&[(Coord::Z(0), ratio(3, 1))]).unwrap();
        assert_eq!(v, ratio(1, 1));
    }

    #[test]
    fn reports_line_and_column() {
        match parse("(+ z0\n   (foo z1))") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
        match parse("(+ z0 q7)") {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!((line, column), (1, 7));
                assert!(message.contains("q7"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(+ z0"), Err(Error::Parse { .. })));
        assert!(matches!(parse("z0 z1"), Err(Error::Parse { line: 1, column: 4, .. })));
        assert!(matches!(parse("(^ z0 z1)"), Err(Error::Parse { .. })));
    }

    #[test]
    fn coordinate_names() {
        assert_eq!(parse_coord("zts12"), Some(Coord::ZTildeStar(12)));
        assert_eq!(parse_coord("zt0"), Some(Coord::ZTilde(0)));
        assert_eq!(parse_coord("zs3"), Some(Coord::ZStar(3)));
        assert_eq!(parse_coord("z"), None);
        assert_eq!(parse_coord("y"), None);
    }
}
