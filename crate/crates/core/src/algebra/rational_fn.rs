//! Quotients of polynomials, kept reduced by content.
//!
//! No polynomial gcd is attempted: the drift-numerator derivations only ever need
//! to (i) combine fractions and (ii) clear a known denominator at the end,
//! which [`RationalFn::times_poly_exact`] does by exact division.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::poly::{Poly, Rat, Var};
use crate::error::{Error, Result};

/// `num / den` with `den` not identically zero.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    /// Builds and normalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Algebra("zero denominator".into()));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalFn {
                num,
                den: Poly::one(),
            };
        }
        // Make the denominator primitive with a positive leading coefficient.
        let mut c = den.content();
        if den.leading_term().map(|(_, k)| k.is_negative()).unwrap_or(false) {
            c = -c;
        }
        let inv = Rat::one() / &c;
        let (num, den) = (num.scale(&inv), den.scale(&inv));
        if den.is_constant() {
            return RationalFn {
                num,
                den: Poly::one(),
            };
        }
        RationalFn { num, den }
    }

    /// A polynomial viewed as a rational function.
    pub fn from_poly(p: Poly) -> Self {
        RationalFn {
            num: p,
            den: Poly::one(),
        }
    }

    /// Numerator.
    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Denominator.
    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Converts to a polynomial when the denominator divides the numerator.
    pub fn to_poly(&self) -> Result<Poly> {
        self.num.div_exact(&self.den)
    }

    /// `self · q` as a polynomial; fails unless the product is polynomial.
    pub fn times_poly_exact(&self, q: &Poly) -> Result<Poly> {
        (&self.num * q).div_exact(&self.den)
    }

    /// Reciprocal.
    pub fn recip(&self) -> Result<Self> {
        RationalFn::new(self.den.clone(), self.num.clone())
    }

    /// Exact evaluation.
    pub fn eval(&self, point: &[(Var, Rat)]) -> Result<Rat> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::Domain("denominator vanishes at the point".into()));
        }
        Ok(self.num.eval(point)? / d)
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, point: &[(Var, f64)]) -> Result<f64> {
        Ok(self.num.eval_f64(point)? / self.den.eval_f64(point)?)
    }

    /// Replaces `v` by a rational function: `f(n/d) = Σ c_i n^i d^(K-i) / d^K`.
    pub fn compose(&self, v: Var, r: &RationalFn) -> Result<RationalFn> {
        let num = compose_poly(&self.num, v, r);
        let den = compose_poly(&self.den, v, r);
        num / den
    }

    /// Replaces `v` by a polynomial.
    pub fn substitute(&self, v: Var, q: &Poly) -> Result<RationalFn> {
        RationalFn::new(self.num.substitute(v, q), self.den.substitute(v, q))
    }
}

/// `p(v = r)` for a polynomial `p` and rational function `r`.
pub fn compose_poly(p: &Poly, v: Var, r: &RationalFn) -> RationalFn {
    let cs = p.coeffs_in(v);
    if cs.is_empty() {
        return RationalFn::from_poly(Poly::zero());
    }
    let k = cs.len() - 1;
    let (n, d) = (r.num(), r.den());
    // Powers of n and d up to K.
    let mut npow = vec![Poly::one()];
    let mut dpow = vec![Poly::one()];
    for i in 1..=k {
        npow.push(&npow[i - 1] * n);
        dpow.push(&dpow[i - 1] * d);
    }
    let mut num = Poly::zero();
    for (i, c) in cs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        num = &num + &(&(c * &npow[i]) * &dpow[k - i]);
    }
    RationalFn::normalized(num, dpow[k].clone())
}

/// `∫_lower^upper f dv` where `f` has no `v` in its denominator.
pub fn definite_integral(
    f: &RationalFn,
    v: Var,
    lower: &RationalFn,
    upper: &RationalFn,
) -> Result<RationalFn> {
    if f.den().degree(v) > 0 {
        return Err(Error::Algebra(format!(
            "integrand is not polynomial in {}",
            v.name()
        )));
    }
    let anti = f.num().antiderivative(v);
    let hi = compose_poly(&anti, v, upper);
    let lo = compose_poly(&anti, v, lower);
    (hi - lo) / RationalFn::from_poly(f.den().clone())
}

impl Add<&RationalFn> for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub<&RationalFn> for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul<&RationalFn> for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div<&RationalFn> for &RationalFn {
    type Output = Result<RationalFn>;
    fn div(self, rhs: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $out:ty) => {
        impl $tr<RationalFn> for RationalFn {
            type Output = $out;
            fn $m(self, rhs: RationalFn) -> $out {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&RationalFn> for RationalFn {
            type Output = $out;
            fn $m(self, rhs: &RationalFn) -> $out {
                (&self).$m(rhs)
            }
        }
        impl $tr<RationalFn> for &RationalFn {
            type Output = $out;
            fn $m(self, rhs: RationalFn) -> $out {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add, RationalFn);
forward_owned!(Sub, sub, RationalFn);
forward_owned!(Mul, mul, RationalFn);
forward_owned!(Div, div, Result<RationalFn>);

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

impl From<Poly> for RationalFn {
    fn from(p: Poly) -> Self {
        RationalFn::from_poly(p)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term().is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFn({self})")
    }
}

/// Convenience: `Zero`-like constructor used by callers that fold sums.
pub fn rf_zero() -> RationalFn {
    RationalFn::from_poly(Poly::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{rat, rint};

    fn v(x: Var) -> RationalFn {
        RationalFn::from_poly(Poly::var(x))
    }

    #[test]
    fn integral_of_z_over_unit_interval() {
        let one = RationalFn::from_poly(Poly::one());
        let zero = rf_zero();
        let r = definite_integral(&v(Var::Z), Var::Z, &zero, &one).unwrap();
        assert_eq!(r.to_poly().unwrap(), Poly::constant(rat(1, 2)));
    }

    #[test]
    fn integral_of_shifted_linear() {
        // ∫_a^t (z - a) dz = (t - a)^2 / 2
        let f = &v(Var::Z) - &v(Var::A);
        let r = definite_integral(&f, Var::Z, &v(Var::A), &v(Var::W)).unwrap();
        let expect = (Poly::var(Var::W) - Poly::var(Var::A)).pow(2).scale(&rat(1, 2));
        assert_eq!(r.to_poly().unwrap(), expect);
    }

    #[test]
    fn integrand_with_z_in_denominator_is_rejected() {
        let f = RationalFn::new(Poly::one(), Poly::var(Var::Z)).unwrap();
        let r = definite_integral(&f, Var::Z, &rf_zero(), &v(Var::A));
        assert!(r.is_err());
    }

    #[test]
    fn compose_with_rational_function() {
        // p -> (1 + x)/2 in 2p - 1 gives x.
        let f = RationalFn::from_poly(Poly::int(2) * Poly::var(Var::P) - Poly::one());
        let sub = RationalFn::new(Poly::one() + Poly::var(Var::X1), Poly::int(2)).unwrap();
        let g = f.compose(Var::P, &sub).unwrap();
        assert_eq!(g.to_poly().unwrap(), Poly::var(Var::X1));
    }

    #[test]
    fn arithmetic_evaluates_consistently() {
        let f = (&v(Var::A) / &(&v(Var::B) + &RationalFn::from_poly(Poly::one()))).unwrap();
        let g = &f * &f - &f;
        let pt = [(Var::A, rat(2, 3)), (Var::B, rint(5))];
        let fv = rat(2, 3) / rint(6);
        assert_eq!(g.eval(&pt).unwrap(), &fv * &fv - &fv);
    }
}
