//! A tiny expression language for writing game predicates.
//!
//! Expressions range over the variables `x`, `y`, `a`, `b` and integer
//! literals. Operators, loosest binding first:
//!
//! | level | operators            |
//! |-------|----------------------|
//! | 1     | `or`                 |
//! | 2     | `xor`                |
//! | 3     | `and`                |
//! | 4     | `==` `!=`            |
//! | 5     | `+` `-`              |
//! | 6     | `*` `%`              |
//! | 7     | unary `not`, unary `-` |
//!
//! All values are integers. Comparisons and boolean operators produce `0`
//! or `1`, and any nonzero integer is truthy. `%` is the mathematical
//! modulus, so its result is never negative.
//!
//! ```
//! use nlbounds::dsl::PredicateExpr;
//! let chsh: PredicateExpr = "(a + b) % 2 == x * y".parse().unwrap();
//! assert!(chsh.holds(1, 1, 0, 1).unwrap());
//! assert!(!chsh.holds(1, 1, 0, 0).unwrap());
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    Xor,
    And,
    Eq,
    Ne,
    Add,
    Sub,
    Mul,
    Mod,
}

/// Abstract syntax tree of a predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PredicateExpr {
    Lit(i64),
    Var(Var),
    Unary(UnaryOp, Box<PredicateExpr>),
    Binary(BinaryOp, Box<PredicateExpr>, Box<PredicateExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value = src[start..i].parse::<i64>().map_err(|_| Error::Dsl {
                position: start,
                message: "integer literal too large".into(),
            })?;
            out.push((Tok::Int(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let two = if i + 1 < bytes.len() { &src[i..i + 2] } else { "" };
        let tok = match (c, two) {
            (_, "==") => Tok::Op("=="),
            (_, "!=") => Tok::Op("!="),
            (b'+', _) => Tok::Op("+"),
            (b'-', _) => Tok::Op("-"),
            (b'*', _) => Tok::Op("*"),
            (b'%', _) => Tok::Op("%"),
            (b'(', _) => Tok::LParen,
            (b')', _) => Tok::RParen,
            _ => {
                return Err(Error::Dsl {
                    position: start,
                    message: format!("unexpected character `{}`", src[start..].chars().next().unwrap()),
                })
            }
        };
        i += match tok {
            Tok::Op(s) => s.len(),
            _ => 1,
        };
        out.push((tok, start));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Dsl {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, ops: &[&'static str]) -> Option<&'static str> {
        if let Some(Tok::Op(s)) = self.peek() {
            if let Some(found) = ops.iter().find(|o| *o == s) {
                self.pos += 1;
                return Some(found);
            }
        }
        None
    }

    fn keyword_level(
        &mut self,
        kw: &str,
        op: BinaryOp,
        next: fn(&mut Self) -> Result<PredicateExpr>,
    ) -> Result<PredicateExpr> {
        let mut lhs = next(self)?;
        while self.eat_keyword(kw) {
            let rhs = next(self)?;
            lhs = PredicateExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<PredicateExpr> {
        self.keyword_level("or", BinaryOp::Or, Self::xor)
    }

    fn xor(&mut self) -> Result<PredicateExpr> {
        self.keyword_level("xor", BinaryOp::Xor, Self::and)
    }

    fn and(&mut self) -> Result<PredicateExpr> {
        self.keyword_level("and", BinaryOp::And, Self::equality)
    }

    fn equality(&mut self) -> Result<PredicateExpr> {
        let mut lhs = self.additive()?;
        while let Some(op) = self.eat_op(&["==", "!="]) {
            let rhs = self.additive()?;
            let op = if op == "==" { BinaryOp::Eq } else { BinaryOp::Ne };
            lhs = PredicateExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<PredicateExpr> {
        let mut lhs = self.multiplicative()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let rhs = self.multiplicative()?;
            let op = if op == "+" { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = PredicateExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<PredicateExpr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&["*", "%"]) {
            let rhs = self.unary()?;
            let op = if op == "*" { BinaryOp::Mul } else { BinaryOp::Mod };
            lhs = PredicateExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<PredicateExpr> {
        if self.eat_keyword("not") {
            return Ok(PredicateExpr::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat_op(&["-"]).is_some() {
            return Ok(PredicateExpr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<PredicateExpr> {
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return self.error("unexpected end of expression");
        };
        match tok {
            Tok::Int(v) => {
                self.pos += 1;
                Ok(PredicateExpr::Lit(v))
            }
            Tok::Ident(name) => {
                let var = match name.as_str() {
                    "x" => Var::X,
                    "y" => Var::Y,
                    "a" => Var::A,
                    "b" => Var::B,
                    "and" | "or" | "xor" | "not" => {
                        return self.error(format!("unexpected keyword `{name}`"))
                    }
                    _ => return Err(Error::UnknownIdentifier(name)),
                };
                self.pos += 1;
                Ok(PredicateExpr::Var(var))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::RParen => self.error("unexpected `)`"),
            Tok::Op(op) => self.error(format!("unexpected operator `{op}`")),
        }
    }
}

impl FromStr for PredicateExpr {
    type Err = Error;

    fn from_str(src: &str) -> Result<Self> {
        let mut parser = Parser {
            toks: lex(src)?,
            pos: 0,
            end: src.len(),
        };
        let expr = parser.or()?;
        if parser.pos != parser.toks.len() {
            return parser.error("trailing input");
        }
        Ok(expr)
    }
}

impl PredicateExpr {
    /// Integer value of the expression at one quadruple.
    pub fn eval(&self, x: i64, y: i64, a: i64, b: i64) -> Result<i64> {
        use BinaryOp::*;
        Ok(match self {
            PredicateExpr::Lit(v) => *v,
            PredicateExpr::Var(Var::X) => x,
            PredicateExpr::Var(Var::Y) => y,
            PredicateExpr::Var(Var::A) => a,
            PredicateExpr::Var(Var::B) => b,
            PredicateExpr::Unary(UnaryOp::Not, e) => (e.eval(x, y, a, b)? == 0) as i64,
            PredicateExpr::Unary(UnaryOp::Neg, e) => e.eval(x, y, a, b)?.wrapping_neg(),
            PredicateExpr::Binary(op, l, r) => {
                let l = l.eval(x, y, a, b)?;
                let r = r.eval(x, y, a, b)?;
                match op {
                    Or => (l != 0 || r != 0) as i64,
                    Xor => ((l != 0) != (r != 0)) as i64,
                    And => (l != 0 && r != 0) as i64,
                    Eq => (l == r) as i64,
                    Ne => (l != r) as i64,
                    Add => l.wrapping_add(r),
                    Sub => l.wrapping_sub(r),
                    Mul => l.wrapping_mul(r),
                    Mod => {
                        if r == 0 {
                            return Err(Error::Dsl {
                                position: 0,
                                message: "modulus by zero".into(),
                            });
                        }
                        l.rem_euclid(r)
                    }
                }
            }
        })
    }

    /// Truthiness of the expression at one quadruple.
    pub fn holds(&self, x: usize, y: usize, a: usize, b: usize) -> Result<bool> {
        Ok(self.eval(x as i64, y as i64, a as i64, b as i64)? != 0)
    }
}

impl fmt::Display for PredicateExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateExpr::Lit(v) => write!(f, "{v}"),
            PredicateExpr::Var(v) => f.write_str(match v {
                Var::X => "x",
                Var::Y => "y",
                Var::A => "a",
                Var::B => "b",
            }),
            PredicateExpr::Unary(UnaryOp::Not, e) => write!(f, "(not {e})"),
            PredicateExpr::Unary(UnaryOp::Neg, e) => write!(f, "(-{e})"),
            PredicateExpr::Binary(op, l, r) => {
                let sym = match op {
                    BinaryOp::Or => "or",
                    BinaryOp::Xor => "xor",
                    BinaryOp::And => "and",
                    BinaryOp::Eq => "==",
                    BinaryOp::Ne => "!=",
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Mod => "%",
                };
                write!(f, "({l} {sym} {r})")
            }
        }
    }
}

/// Evaluates `expr` over every quadruple and returns the row-major 0/1
/// table indexed `(x, y, a, b)`.
pub fn parse_predicate_dsl(expr: &str, nx: usize, ny: usize, na: usize, nb: usize) -> Result<Vec<f64>> {
    let ast: PredicateExpr = expr.parse()?;
    let mut table = Vec::with_capacity(nx * ny * na * nb);
    for x in 0..nx {
        for y in 0..ny {
            for a in 0..na {
                for b in 0..nb {
                    table.push(if ast.holds(x, y, a, b)? { 1.0 } else { 0.0 });
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_table() {
        assert_eq!(parse_predicate_dsl("x == y", 2, 2, 1, 1).unwrap(), vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn chsh_table_has_eight_wins() {
        let t = parse_predicate_dsl("(a + b) % 2 == x * y", 2, 2, 2, 2).unwrap();
        assert_eq!(t.iter().filter(|v| **v == 1.0).count(), 8);
        // (x,y,a,b) = (1,1,0,0) loses.
        assert_eq!(t[0b1100], 0.0);
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse_predicate_dsl("q == 1", 2, 2, 2, 2).unwrap_err(),
            Error::UnknownIdentifier("q".into())
        );
    }

    #[test]
    fn precedence_is_c_like() {
        let e: PredicateExpr = "1 + 2 * 3 == 7 and not 0".parse().unwrap();
        assert_eq!(e.eval(0, 0, 0, 0).unwrap(), 1);
        // `and` binds tighter than `xor`, which binds tighter than `or`.
        let e: PredicateExpr = "1 or 1 xor 1 and 0".parse().unwrap();
        assert_eq!(e.eval(0, 0, 0, 0).unwrap(), 1);
        let e: PredicateExpr = "(1 or 1) xor 1".parse().unwrap();
        assert_eq!(e.eval(0, 0, 0, 0).unwrap(), 0);
    }

    #[test]
    fn modulus_is_non_negative() {
        let e: PredicateExpr = "(a - b) % 3".parse().unwrap();
        assert_eq!(e.eval(0, 0, 0, 1).unwrap(), 2);
        let e: PredicateExpr = "-7 % 3".parse().unwrap();
        assert_eq!(e.eval(0, 0, 0, 0).unwrap(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        match "x == (y".parse::<PredicateExpr>() {
            Err(Error::Dsl { position, .. }) => assert_eq!(position, 7),
            other => panic!("unexpected {other:?}"),
        }
        match "x $ y".parse::<PredicateExpr>() {
            Err(Error::Dsl { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!("x ==".parse::<PredicateExpr>().is_err());
        assert!("x y".parse::<PredicateExpr>().is_err());
        assert!("a % 0".parse::<PredicateExpr>().unwrap().eval(0, 0, 0, 0).is_err());
    }

    #[test]
    fn display_reparses_to_same_tree() {
        let e: PredicateExpr = "not x == y xor -(a % 2) != b or 3".parse().unwrap();
        let again: PredicateExpr = e.to_string().parse().unwrap();
        assert_eq!(e, again);
    }
}
