//! Sampling helpers shared by the property suite and the acceptance harness.
#![allow(dead_code)]

use num_bigint::BigInt;
use pcontest::algebra::{Exps, Poly, Rat, Var, NVARS};
use pcontest::cases::{drift_integral, NormalizedCore, RemovalTag};
use pcontest::process::Removal;
use rand::Rng;

/// Lower end `N/(2(N-1)) = (M+1)/(2M)` of the drift-sign range of `p`.
pub fn p_floor(m: u32) -> f64 {
    (m as f64 + 1.0) / (2.0 * m as f64)
}

/// A valid normalized core from unit-interval coordinates.
pub fn core_from_unit(m: u32, ua: f64, umu: f64) -> NormalizedCore {
    let a = ua.clamp(0.0, 1.0);
    let (lo, hi) = NormalizedCore::mu_range(a, m);
    // For M = 2 the range is a single point that rounding may invert.
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let mu = (lo + umu.clamp(0.0, 1.0) * (hi - lo)).clamp(lo, hi);
    NormalizedCore::new(a, mu, m).expect("core inside the realizable range")
}

/// `p` in `[(M+1)/(2M), 1)` from a unit coordinate.
pub fn lemma_range_p(m: u32, u: f64) -> f64 {
    let lo = p_floor(m);
    lo + u.clamp(0.0, 0.999_999) * (1.0 - lo)
}

/// Which of `{z, a, 1}` a removal took out of the realized configuration.
pub fn tag_of(removal: &Removal, a: f64, z: f64) -> Option<RemovalTag> {
    let v = removal.value;
    if v == z {
        Some(RemovalTag::RemoveZ)
    } else if v == a {
        Some(RemovalTag::RemoveA)
    } else if v == 1.0 {
        Some(RemovalTag::RemoveOne)
    } else {
        None
    }
}

/// Uniform rational in `[lo, hi]` with denominator dividing `den·den(lo)·den(hi)`.
pub fn rat_between<R: Rng>(rng: &mut R, lo: &Rat, hi: &Rat, den: i64) -> Rat {
    let k = rng.random_range(0..=den);
    lo + (hi - lo) * Rat::new(BigInt::from(k), BigInt::from(den))
}

/// An exact sample `(a, μ, p, M)` of the drift-sign domain: `0 ≤ a < 1`,
/// `μ` realizable, `(M+1)/(2M) ≤ p < 1`.
pub fn exact_domain_point<R: Rng>(rng: &mut R, m: u32) -> (Rat, Rat, Rat, Rat) {
    let mr = Rat::from_integer(BigInt::from(m));
    let one = Rat::from_integer(BigInt::from(1));
    let a = Rat::new(BigInt::from(rng.random_range(0..1_000_000i64)), BigInt::from(1_000_000));
    let lo = ((&mr - &one) * &a + &one) / &mr;
    let hi = (&a + &mr - &one) / &mr;
    let mu = rat_between(rng, &lo, &hi, 1 << 20);
    let pl = (&mr + &one) / (&mr * Rat::from_integer(BigInt::from(2)));
    let p = &pl + (&one - &pl) * Rat::new(BigInt::from(rng.random_range(0..1_000_000i64)), BigInt::from(1_000_000));
    (a, mu, p, mr)
}

/// Exact `p1, p2, p3`.
pub fn exact_critical_ps(a: &Rat, mu: &Rat, m: &Rat) -> (Rat, Rat, Rat) {
    let one = Rat::from_integer(BigInt::from(1));
    let two = Rat::from_integer(BigInt::from(2));
    let p1 = (m + &one) / (&two * m * mu);
    let p2 = (m + &one) * (a + &one) / (&two * m * mu + &two * a);
    let p3 = (m + &one) * (a + &one) / (&two * m * mu + &two);
    (p1, p2, p3)
}

/// Exact active `I_j` (ties at `X_i = 0` resolved towards the positive side).
pub fn exact_active_i(a: &Rat, mu: &Rat, p: &Rat, m: &Rat) -> (usize, Rat) {
    let (p1, p2, p3) = exact_critical_ps(a, mu, m);
    let x1 = p >= &p1;
    let x2 = p >= &p2;
    let x3 = p >= &p3;
    let j = if x2 {
        1
    } else {
        match (x1, x3) {
            (false, false) => 0,
            (true, true) => 2,
            (true, false) => 3,
            (false, true) => 4,
        }
    };
    (j, drift_integral(j, a.clone(), mu.clone(), m.clone(), p.clone()))
}

/// Random polynomial in the cube variables `x1..x{d}` with small rational
/// coefficients and per-variable degree at most `deg`.
pub fn random_cube_poly<R: Rng>(rng: &mut R, d: usize, deg: u16, terms: usize) -> Poly {
    let axes = [Var::X1, Var::X2, Var::X3];
    let mut f = Poly::zero();
    for _ in 0..terms {
        let mut e: Exps = [0; NVARS];
        for v in axes.iter().take(d) {
            e[v.index()] = rng.random_range(0..=deg);
        }
        let c = Rat::new(BigInt::from(rng.random_range(-40i64..=40)), BigInt::from(rng.random_range(1i64..=12)));
        f.add_term(e, c);
    }
    f
}

/// Random point of the cube in exact rationals.
pub fn random_cube_point<R: Rng>(rng: &mut R, f: &Poly) -> Vec<(Var, Rat)> {
    f.vars()
        .into_iter()
        .map(|v| (v, Rat::new(BigInt::from(rng.random_range(0..=1_000_000i64)), BigInt::from(1_000_000))))
        .collect()
}
