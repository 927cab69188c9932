//! Text syntax for scalars: integers, `p/q`, decimals, `sqrt(n)`,
//! `root(n,k)`, `pi`, `algebraic(c0,…,cd; lo,hi)`, named bindings, and the
//! operators `+ - * / ^` with parentheses.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{NumError, QPoly, Scalar, Vec3};

/// Named values usable inside expressions.
pub type Bindings = HashMap<String, Scalar>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn perr(msg: impl Into<String>) -> NumError {
    NumError::Parse(msg.into())
}

fn tokenize(s: &str) -> Result<Vec<Tok>, NumError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Tok::Num(parse_decimal(&lit)?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),;".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Op('-'));
            i += 1;
        } else {
            return Err(perr(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<BigRational, NumError> {
    let mut parts = lit.splitn(2, '.');
    let ip = parts.next().unwrap_or("");
    let fp = parts.next().unwrap_or("");
    if fp.contains('.') {
        return Err(perr(format!("malformed number '{lit}'")));
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| perr(lit))? };
    let d = num_traits::pow(BigInt::from(10), fp.len());
    Ok(BigRational::new(n, d))
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    env: &'a Bindings,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), NumError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(perr(format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Scalar, NumError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, NumError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.try_mul(&self.unary()?)?;
            } else if self.eat('/') {
                acc = acc.try_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, NumError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, NumError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            let e = e
                .as_rational()
                .filter(|r| r.is_integer())
                .and_then(|r| r.to_integer().to_i64())
                .ok_or_else(|| perr("exponent must be an integer"))?;
            if e.abs() > 4096 {
                return Err(perr("exponent too large"));
            }
            return base.pow(e);
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Scalar>, NumError> {
        let mut v = vec![self.expr()?];
        while self.eat(',') {
            v.push(self.expr()?);
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<Scalar, NumError> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Scalar::Rational(r))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.ident(&name)
            }
            Some(t) => Err(perr(format!("unexpected token {t:?}"))),
            None => Err(perr("unexpected end of input")),
        }
    }

    fn ident(&mut self, name: &str) -> Result<Scalar, NumError> {
        match name {
            "pi" | "π" => Ok(Scalar::pi()),
            "sqrt" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(')')?;
                Scalar::sqrt(rational_arg(&a, "sqrt")?)
            }
            "root" => {
                self.expect('(')?;
                let a = self.args()?;
                self.expect(')')?;
                if a.len() != 2 {
                    return Err(perr("root takes two arguments: root(n, k)"));
                }
                let k = rational_arg(&a[1], "root")?
                    .to_integer()
                    .to_u32()
                    .filter(|k| *k >= 1 && rational_arg(&a[1], "root").is_ok_and(|r| r.is_integer()))
                    .ok_or_else(|| perr("root index must be a positive integer"))?;
                Scalar::root(rational_arg(&a[0], "root")?, k)
            }
            "algebraic" => {
                self.expect('(')?;
                let coeffs = self.args()?;
                self.expect(';')?;
                let bounds = self.args()?;
                self.expect(')')?;
                if bounds.len() != 2 {
                    return Err(perr("algebraic(...; lo, hi) needs two interval endpoints"));
                }
                let c = coeffs
                    .iter()
                    .map(|x| rational_arg(x, "algebraic").cloned())
                    .collect::<Result<Vec<_>, _>>()?;
                let p = QPoly::new(c);
                let lo = rational_arg(&bounds[0], "algebraic")?;
                let hi = rational_arg(&bounds[1], "algebraic")?;
                Scalar::algebraic(&p, lo, hi)
            }
            other => self.env.get(other).cloned().ok_or_else(|| perr(format!("unknown name '{other}'"))),
        }
    }
}

fn rational_arg<'a>(s: &'a Scalar, f: &str) -> Result<&'a BigRational, NumError> {
    s.as_rational().ok_or_else(|| perr(format!("{f} expects rational arguments")))
}

/// Parses one scalar expression.
pub fn parse_scalar(text: &str, env: &Bindings) -> Result<Scalar, NumError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, env };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(format!("trailing input in '{text}'")));
    }
    Ok(v)
}

/// Splits on commas outside parentheses.
pub(crate) fn split_top_level(text: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    parts.push(cur);
    parts
}

/// Parses `a,b,c` into a vector whose coordinates share one field.
pub fn parse_vec3(text: &str, env: &Bindings) -> Result<Vec3, NumError> {
    let parts = split_top_level(text);
    if parts.len() != 3 {
        return Err(perr(format!("expected three comma-separated coordinates, got {}", parts.len())));
    }
    let v: Vec<Scalar> = parts.iter().map(|p| parse_scalar(p, env)).collect::<Result<_, _>>()?;
    let [a, b, c]: [Scalar; 3] = v.try_into().map_err(|_| perr("arity"))?;
    Vec3::new(a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Scalar {
        parse_scalar(s, &Bindings::new()).unwrap()
    }

    #[test]
    fn literals() {
        assert_eq!(p("2.5"), Scalar::from_ratio(5, 2));
        assert_eq!(p("-3/4"), Scalar::from_ratio(-3, 4));
        assert_eq!(p("2^-2"), Scalar::from_ratio(1, 4));
        assert_eq!(p("(1+2)*3 - 4/2"), Scalar::from_int(7));
        assert_eq!(p("sqrt(16)"), Scalar::from_int(4));
        assert_eq!(p("sqrt(1/2)*sqrt(2)"), Scalar::one());
        assert_eq!(p("root(10,3)^3"), Scalar::from_int(10));
    }

    #[test]
    fn algebraic_literal() {
        let a = p("algebraic(-1,1,1,1; 1/2, 3/5)");
        assert!(matches!(a, Scalar::Algebraic(_)));
        // linear factor collapses to a rational
        assert_eq!(p("algebraic(-6,1,1; 1, 3)"), Scalar::from_int(2));
        assert!(parse_scalar("algebraic(-1,0,1; -2, 2)", &Bindings::new()).is_err());
    }

    #[test]
    fn errors() {
        for bad in ["", "1+", "sqrt(-1)", "foo", "1 2", "2^(1/2)", "1/0", "1/(pi-pi)", "root(2, 0)"] {
            assert!(parse_scalar(bad, &Bindings::new()).is_err(), "{bad}");
        }
        assert!(parse_vec3("1,2", &Bindings::new()).is_err());
    }

    #[test]
    fn vectors_split_on_top_level_commas() {
        let v = parse_vec3("1, root(10,3), pi", &Bindings::new()).unwrap();
        assert!(matches!(v.0[2], Scalar::IntervalReal(_)));
        assert_eq!(split_top_level("root(2,3),1,2"), vec!["root(2,3)", "1", "2"]);
    }
}
