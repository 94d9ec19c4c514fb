//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables come from a fixed, ordered alphabet ([`Var`]); a monomial is an
//! exponent vector over that alphabet. Terms live in a `BTreeMap`, so the term
//! order (lexicographic, `a` most significant) is canonical and serialization
//! is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the algebra module.
pub type Rat = BigRational;

/// Number of variables in the alphabet.
pub const NVARS: usize = 12;

/// Exponent vector indexed by [`Var::index`].
pub type Exps = [u16; NVARS];

/// The fixed variable alphabet, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    A,
    B,
    Mu,
    P,
    M,
    Delta,
    W,
    Nu,
    X1,
    X2,
    X3,
    Z,
}

impl Var {
    /// All variables in canonical order.
    pub const ALL: [Var; NVARS] = [
        Var::A,
        Var::B,
        Var::Mu,
        Var::P,
        Var::M,
        Var::Delta,
        Var::W,
        Var::Nu,
        Var::X1,
        Var::X2,
        Var::X3,
        Var::Z,
    ];

    /// Position of the variable in an exponent vector.
    pub fn index(self) -> usize {
        self as usize
    }

    /// ASCII name used by the parser and the corpus format.
    pub fn name(self) -> &'static str {
        match self {
            Var::A => "a",
            Var::B => "b",
            Var::Mu => "mu",
            Var::P => "p",
            Var::M => "M",
            Var::Delta => "delta",
            Var::W => "w",
            Var::Nu => "nu",
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::Z => "z",
        }
    }

    /// Looks a variable up by its ASCII name (or the Greek letter).
    pub fn from_name(s: &str) -> Option<Var> {
        Some(match s {
            "a" => Var::A,
            "b" => Var::B,
            "mu" | "μ" => Var::Mu,
            "p" => Var::P,
            "M" => Var::M,
            "delta" | "δ" => Var::Delta,
            "w" => Var::W,
            "nu" | "ν" => Var::Nu,
            "x1" => Var::X1,
            "x2" => Var::X2,
            "x3" => Var::X3,
            "z" => Var::Z,
            _ => return None,
        })
    }
}

/// Builds a rational from a pair of machine integers.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Builds an integral rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Multivariate polynomial over the rationals. No zero coefficients are stored.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Exps, Rat>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly::default()
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rat) -> Self {
        let mut p = Poly::zero();
        p.add_term([0; NVARS], c);
        p
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    /// An integer constant.
    pub fn int(n: i64) -> Self {
        Poly::constant(rint(n))
    }

    /// The polynomial consisting of the single variable `v`.
    pub fn var(v: Var) -> Self {
        Poly::monomial(Rat::one(), &[(v, 1)])
    }

    /// `c · Π v^e` for the listed variable powers.
    pub fn monomial(c: Rat, powers: &[(Var, u16)]) -> Self {
        let mut e = [0u16; NVARS];
        for &(v, k) in powers {
            e[v.index()] += k;
        }
        let mut p = Poly::zero();
        p.add_term(e, c);
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Exps, Rat)>>(terms: I) -> Self {
        let mut p = Poly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c · x^e` in place.
    pub fn add_term(&mut self, e: Exps, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial has no variable dependence.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rat {
        self.terms.get(&[0; NVARS]).cloned().unwrap_or_else(Rat::zero)
    }

    /// Number of stored (non-zero) terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rat)> {
        self.terms.iter()
    }

    /// Coefficient of the monomial `e` (zero when absent).
    pub fn coeff(&self, e: &Exps) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Variables that actually occur, in canonical order.
    pub fn vars(&self) -> Vec<Var> {
        Var::ALL
            .iter()
            .copied()
            .filter(|v| self.terms.keys().any(|e| e[v.index()] > 0))
            .collect()
    }

    /// Degree in a single variable (0 for the zero polynomial).
    pub fn degree(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v.index()] as u32).max().unwrap_or(0)
    }

    /// Total degree (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as u32).sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// `self^n` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Splits the polynomial by powers of `v`: entry `i` is the coefficient of `v^i`.
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly> {
        let deg = self.degree(v) as usize;
        let mut out = vec![Poly::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &self.terms {
            let k = e[v.index()] as usize;
            let mut e2 = *e;
            e2[v.index()] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Reassembles `Σ c_i v^i` from coefficient polynomials.
    pub fn from_coeffs_in(v: Var, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            for (e, k) in &c.terms {
                let mut e2 = *e;
                e2[v.index()] += i as u16;
                out.add_term(e2, k.clone());
            }
        }
        out
    }

    /// Replaces `v` by the polynomial `q` (Horner scheme over the powers of `v`).
    pub fn substitute(&self, v: Var, q: &Poly) -> Poly {
        let cs = self.coeffs_in(v);
        let mut acc = Poly::zero();
        for c in cs.iter().rev() {
            acc = &(&acc * q) + c;
        }
        acc
    }

    /// Fixes `v` to a rational value.
    pub fn partial_eval(&self, v: Var, x: &Rat) -> Poly {
        self.substitute(v, &Poly::constant(x.clone()))
    }

    /// Partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.add_term(e2, c * rint(e[i] as i64));
        }
        out
    }

    /// Antiderivative in `v` with zero constant of integration.
    pub fn antiderivative(&self, v: Var) -> Poly {
        let i = v.index();
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            e2[i] += 1;
            out.add_term(e2, c / rint(e2[i] as i64));
        }
        out
    }

    /// Exact evaluation. Variables missing from `point` are an error.
    pub fn eval(&self, point: &[(Var, Rat)]) -> Result<Rat> {
        let mut vals: [Option<&Rat>; NVARS] = [None; NVARS];
        for (v, x) in point {
            vals[v.index()] = Some(x);
        }
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let x = vals[i].ok_or_else(|| {
                        Error::Algebra(format!("no value for variable {}", Var::ALL[i].name()))
                    })?;
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point evaluation (missing variables are an error).
    pub fn eval_f64(&self, point: &[(Var, f64)]) -> Result<f64> {
        let mut vals = [f64::NAN; NVARS];
        let mut have = [false; NVARS];
        for &(v, x) in point {
            vals[v.index()] = x;
            have[v.index()] = true;
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    if !have[i] {
                        return Err(Error::Algebra(format!(
                            "no value for variable {}",
                            Var::ALL[i].name()
                        )));
                    }
                    t *= vals[i].powi(k as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients
    /// (gcd of numerators over lcm of denominators). Zero for the zero polynomial.
    pub fn content(&self) -> Rat {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            Rat::zero()
        } else {
            Rat::new(g, l)
        }
    }

    /// Least common multiple of all coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()))
    }

    /// Leading term in the canonical (lexicographic) order.
    pub fn leading_term(&self) -> Option<(&Exps, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Exact division. Fails unless `divisor` divides `self` in `Q[vars]`.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (de, dc) = divisor
            .leading_term()
            .ok_or_else(|| Error::Algebra("division by the zero polynomial".into()))?;
        let (de, dc) = (*de, dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((re, rc)) = rem.leading_term() {
            let mut qe = [0u16; NVARS];
            for i in 0..NVARS {
                if re[i] < de[i] {
                    return Err(Error::Algebra("polynomial division is not exact".into()));
                }
                qe[i] = re[i] - de[i];
            }
            let qc = rc / &dc;
            for (e, c) in &divisor.terms {
                let mut te = *e;
                for i in 0..NVARS {
                    te[i] += qe[i];
                }
                rem.add_term(te, -(&qc * c));
            }
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// Splits into the positive-coefficient part and the negated negative part.
    pub fn sign_parts(&self) -> (Poly, Poly) {
        let mut plus = Poly::zero();
        let mut minus = Poly::zero();
        for (e, c) in &self.terms {
            if c.is_positive() {
                plus.add_term(*e, c.clone());
            } else {
                minus.add_term(*e, -c.clone());
            }
        }
        (plus, minus)
    }
}

fn add_into(a: &Poly, b: &Poly, sign: bool) -> Poly {
    let mut out = a.clone();
    for (e, c) in &b.terms {
        out.add_term(*e, if sign { c.clone() } else { -c.clone() });
    }
    out
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        add_into(self, rhs, true)
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        add_into(self, rhs, false)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for i in 0..NVARS {
                    e[i] += eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let n = Var::ALL[i].name();
                    if k == 1 {
                        n.to_string()
                    } else {
                        format!("{n}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(Var::X1)
    }
    fn y() -> Poly {
        Poly::var(Var::X2)
    }

    #[test]
    fn difference_of_squares() {
        let lhs = (x() + y()) * (x() - y());
        let rhs = x().pow(2) - y().pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn affine_substitution() {
        // 2p - 1 with p = (1 + x1)/2 is x1.
        let f = Poly::int(2) * Poly::var(Var::P) - Poly::one();
        let half = Poly::constant(rat(1, 2));
        let sub = &half * &(Poly::one() + x());
        assert_eq!(f.substitute(Var::P, &sub), x());
    }

    #[test]
    fn exact_division_round_trip() {
        let d = x() + Poly::int(2) * y() - Poly::one();
        let q = x().pow(3) - Poly::constant(rat(3, 7)) * y();
        let n = &d * &q;
        assert_eq!(n.div_exact(&d).unwrap(), q);
        assert!((n + Poly::one()).div_exact(&d).is_err());
    }

    #[test]
    fn derivative_and_antiderivative_are_inverse() {
        let f = Poly::constant(rat(5, 3)) * x().pow(4) * y() - x() + Poly::int(9);
        let g = f.antiderivative(Var::X1).derivative(Var::X1);
        assert_eq!(f, g);
    }

    #[test]
    fn content_and_denominators() {
        let f = Poly::constant(rat(4, 3)) * x() + Poly::constant(rat(2, 9));
        assert_eq!(f.content(), rat(2, 9));
        assert_eq!(f.denominator_lcm(), BigInt::from(9));
        assert!(Poly::zero().content().is_zero());
    }

    #[test]
    fn coefficient_split_recombines() {
        let f = (x() + y() + Poly::one()).pow(4);
        let cs = f.coeffs_in(Var::X2);
        assert_eq!(cs.len(), 5);
        assert_eq!(Poly::from_coeffs_in(Var::X2, &cs), f);
    }

    #[test]
    fn evaluation_requires_all_variables() {
        let f = x() * y();
        assert!(f.eval(&[(Var::X1, rint(2))]).is_err());
        assert_eq!(f.eval(&[(Var::X1, rint(2)), (Var::X2, rat(1, 4))]).unwrap(), rat(1, 2));
    }
}
