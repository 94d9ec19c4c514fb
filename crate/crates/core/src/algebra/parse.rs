//! Text front ends for polynomials.
//!
//! * [`parse_poly`] reads human-transcribed formulas: `+ - * / ^`, parentheses,
//!   decimal literals, and implicit multiplication by juxtaposition
//!   (`4 p^2 mu (2 mu p - 1)`). Division is only allowed by constants.
//! * [`write_corpus`] / [`read_corpus`] implement the canonical corpus format:
//!
//! ```text
//! poly NAME
//! vars a mu p
//! num/den e_a e_mu e_p
//! end
//! ```
//!
//! One monomial per line in canonical term order, so serialization is a pure
//! function of the polynomial and the round trip is bit-exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Exps, Poly, Rat, Var, NVARS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
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
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Tok::Op('^'));
            i += 2;
        } else if "+-*/^()[]".contains(c) {
            let c = match c {
                '[' => '(',
                ']' => ')',
                other => other,
            };
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn parse_decimal(lit: &str) -> Result<Rat> {
    let bad = || Error::Parse(format!("bad number literal {lit:?}"));
    match lit.split_once('.') {
        None => Ok(Rat::from_integer(lit.parse::<BigInt>().map_err(|_| bad())?)),
        Some((int, frac)) => {
            if frac.contains('.') {
                return Err(bad());
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().map_err(|_| bad())?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            Ok(Rat::new(n, d))
        }
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = acc + self.term()?;
            } else if self.eat_op('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('('))
        )
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_op('*') {
                acc = acc * self.unary()?;
            } else if self.eat_op('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(Error::Parse("division only by non-zero constants".into()));
                }
                acc = acc.scale(&(Rat::one() / d.constant_term()));
            } else if self.starts_factor() {
                acc = acc * self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let neg = self.eat_op('-');
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) if !neg && n.is_integer() => {
                    self.pos += 1;
                    let k: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(k))
                }
                _ => Err(Error::Parse("exponent must be a non-negative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Poly::constant(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Var::from_name(&name)
                    .map(Poly::var)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Parse("missing closing parenthesis".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a transcribed formula into an exact polynomial.
pub fn parse_poly(s: &str) -> Result<Poly> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(e)
}

/// Serializes named polynomials in the canonical corpus format.
pub fn write_corpus<'a, I: IntoIterator<Item = (&'a str, &'a Poly)>>(items: I) -> String {
    let mut out = String::new();
    for (name, p) in items {
        let vars = p.vars();
        let _ = writeln!(out, "poly {name}");
        let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
        if names.is_empty() {
            out.push_str("vars\n");
        } else {
            let _ = writeln!(out, "vars {}", names.join(" "));
        }
        for (e, c) in p.terms() {
            let _ = write!(out, "{}/{}", c.numer(), c.denom());
            for v in &vars {
                let _ = write!(out, " {}", e[v.index()]);
            }
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

/// Parses the canonical corpus format; names must be unique. A line
/// `name: expression` is accepted as a one-line entry.
pub fn read_corpus(text: &str) -> Result<BTreeMap<String, Poly>> {
    let mut out = BTreeMap::new();
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    while let Some((ln, line)) = lines.next() {
        if !line.trim().starts_with("poly ") {
            if let Some((name, expr)) = line.split_once(':') {
                let name = name.trim().to_string();
                if name.is_empty() || name.contains(char::is_whitespace) {
                    return Err(Error::Parse(format!("line {}: bad entry name {name:?}", ln + 1)));
                }
                let p = parse_poly(expr).map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))?;
                if out.insert(name.clone(), p).is_some() {
                    return Err(Error::Parse(format!("duplicate entry {name:?}")));
                }
                continue;
            }
        }
        let name = line
            .trim()
            .strip_prefix("poly ")
            .ok_or_else(|| Error::Parse(format!("line {}: expected 'poly NAME'", ln + 1)))?
            .trim()
            .to_string();
        let (ln, vline) = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("{name}: missing vars line")))?;
        let vline = vline.trim();
        let rest = vline
            .strip_prefix("vars")
            .ok_or_else(|| Error::Parse(format!("line {}: expected 'vars'", ln + 1)))?;
        let vars: Vec<Var> = rest
            .split_whitespace()
            .map(|n| Var::from_name(n).ok_or_else(|| Error::Parse(format!("unknown variable {n:?}"))))
            .collect::<Result<_>>()?;
        let mut p = Poly::zero();
        loop {
            let (ln, tl) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("{name}: missing 'end'")))?;
            let tl = tl.trim();
            if tl == "end" {
                break;
            }
            let mut fields = tl.split_whitespace();
            let coef = fields.next().ok_or_else(|| Error::Parse(format!("line {}: empty", ln + 1)))?;
            let (n, d) = coef
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("line {}: coefficient must be num/den", ln + 1)))?;
            let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("line {}: bad numerator", ln + 1)))?;
            let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("line {}: bad denominator", ln + 1)))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("line {}: zero denominator", ln + 1)));
            }
            let mut e: Exps = [0; NVARS];
            for v in &vars {
                let k: u16 = fields
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing exponent", ln + 1)))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad exponent", ln + 1)))?;
                e[v.index()] = k;
            }
            if fields.next().is_some() {
                return Err(Error::Parse(format!("line {}: too many exponents", ln + 1)));
            }
            p.add_term(e, Rat::new(n, d));
        }
        if out.insert(name.clone(), p).is_some() {
            return Err(Error::Parse(format!("duplicate polynomial {name:?}")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::rat;

    #[test]
    fn one_line_corpus_entries() {
        let c = read_corpus("# hand written\nq: x1^2 - x1 + 1/2\n").unwrap();
        assert_eq!(c["q"], parse_poly("x1^2 - x1 + 1/2").unwrap());
        assert!(read_corpus("q: x1\nq: x2\n").is_err());
    }

    #[test]
    fn implicit_multiplication_and_powers() {
        let p = parse_poly("3 p (2 mu p-1)^2").unwrap();
        let mu = Poly::var(Var::Mu);
        let pp = Poly::var(Var::P);
        let expect = Poly::int(3) * &pp * (Poly::int(2) * &mu * &pp - Poly::one()).pow(2);
        assert_eq!(p, expect);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse_poly("-x1^2").unwrap(), -Poly::var(Var::X1).pow(2));
        assert_eq!(parse_poly("2-3 a").unwrap(), Poly::int(2) - Poly::int(3) * Poly::var(Var::A));
    }

    #[test]
    fn decimals_and_constant_division() {
        assert_eq!(parse_poly("22120.5").unwrap(), Poly::constant(rat(44241, 2)));
        assert_eq!(parse_poly("1/2 + mu/4").unwrap().constant_term(), rat(1, 2));
        assert!(parse_poly("1/mu").is_err());
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_poly("").is_err());
        assert!(parse_poly("(a+b").is_err());
        assert!(parse_poly("q+1").is_err());
        assert!(parse_poly("a^b").is_err());
    }

    #[test]
    fn corpus_round_trip_is_bit_exact() {
        let f = parse_poly("-3/7 a^2 mu + 5 p M - 1").unwrap();
        let g = Poly::zero();
        let h = Poly::constant(rat(-2, 3));
        let text = write_corpus([("f", &f), ("g", &g), ("h", &h)]);
        let back = read_corpus(&text).unwrap();
        assert_eq!(back["f"], f);
        assert_eq!(back["g"], g);
        assert_eq!(back["h"], h);
        let again = write_corpus(back.iter().map(|(k, v)| (k.as_str(), v)));
        // BTreeMap reorders by name; the names above are already sorted.
        assert_eq!(again, text);
    }
}
