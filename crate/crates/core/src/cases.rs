//! Normalized-core case analysis for the borderless drift of `h = F + kμ²`.
//!
//! A core of `M = N-1` points is scaled so its maximum is 1; it is then
//! described by its minimum `a`, its mean `μ` and `M`. A fresh point `z` is
//! uniform on `[0, 6]` (borderless sampling with `R = 6·max`). Which of
//! `z`, `a`, `1` gets removed depends on the signs of `X_i = p - p_i` and on
//! the tie cut points `t_z1`, `t_a1`, `t_za`; the five resulting removal maps
//! are labelled A–E and each has a closed-form drift integral `A_j`.

use num_traits::{FromPrimitive, Num, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate_with_breaks;

/// Absolute tolerance for treating `X_i` or a cut-point comparison as a tie.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Core summary `(a, μ, M)` with the maximum normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedCore {
    /// Minimum point.
    pub a: f64,
    /// Mean of the core.
    pub mu: f64,
    /// Core size `M = N - 1`.
    pub m: u32,
}

impl NormalizedCore {
    /// Validates `0 ≤ a ≤ 1`, `M ≥ 2` and that `μ` is realizable by a core
    /// with minimum `a` and maximum 1 (to within `1e-12`).
    pub fn new(a: f64, mu: f64, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("M = {m} must be at least 2")));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Domain(format!("a = {a} outside [0, 1]")));
        }
        let (lo, hi) = Self::mu_range(a, m);
        if mu < lo - 1e-12 || mu > hi + 1e-12 {
            return Err(Error::Domain(format!(
                "mu = {mu} not realizable: need {lo} <= mu <= {hi}"
            )));
        }
        Ok(NormalizedCore { a, mu, m })
    }

    /// The admissible mean range `[((M-1)a+1)/M, (a+M-1)/M]`.
    pub fn mu_range(a: f64, m: u32) -> (f64, f64) {
        let mf = m as f64;
        (((mf - 1.0) * a + 1.0) / mf, (a + mf - 1.0) / mf)
    }

    /// An explicit sorted core with these statistics: minimum `a`, maximum 1
    /// and the remaining `M-2` points at `(Mμ - a - 1)/(M-2)`.
    pub fn realize(&self) -> Vec<f64> {
        let m = self.m as usize;
        let mut pts = vec![self.a];
        if m > 2 {
            let c = ((self.m as f64) * self.mu - self.a - 1.0) / (m as f64 - 2.0);
            let c = c.clamp(self.a, 1.0);
            pts.extend(std::iter::repeat_n(c, m - 2));
        }
        pts.push(1.0);
        pts
    }
}

/// The five removal maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseLabel {
    /// `X1<0, X3<0`: `z<1` removes 1, otherwise `z`.
    A,
    /// `X2>0`: `a<z<t_za` removes `a`, otherwise `z`.
    B,
    /// `X2<0, X1>0, X3>0`: `z | 1 | a | z` split at `t_z1, t_a1, t_za`.
    C,
    /// `X1>0, X3<0`: `z | 1 | z` split at `t_z1, 1`.
    D,
    /// `X1<0, X3>0`: `1 | a | z` split at `t_a1, t_za`.
    E,
}

impl CaseLabel {
    /// Index `j-1` of the drift integral `A_j` attached to the case.
    pub fn index(self) -> usize {
        match self {
            CaseLabel::A => 0,
            CaseLabel::B => 1,
            CaseLabel::C => 2,
            CaseLabel::D => 3,
            CaseLabel::E => 4,
        }
    }

    /// Label from the signs of `X1, X2, X3` (`true` = positive).
    pub fn from_signs(x1: bool, x2: bool, x3: bool) -> CaseLabel {
        if x2 {
            CaseLabel::B
        } else {
            match (x1, x3) {
                (false, false) => CaseLabel::A,
                (true, true) => CaseLabel::C,
                (true, false) => CaseLabel::D,
                (false, true) => CaseLabel::E,
            }
        }
    }
}

/// Which point leaves the configuration `core ∪ {z}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RemovalTag {
    /// The new point `z`.
    RemoveZ,
    /// The core minimum `a`.
    RemoveA,
    /// The core maximum `1`.
    RemoveOne,
}

/// Critical values, cut points, signs and the selected case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    /// `(M+1)/(2Mμ)`.
    pub p1: f64,
    /// `(M+1)(a+1)/(2Mμ+2a)`.
    pub p2: f64,
    /// `(M+1)(a+1)/(2Mμ+2)`.
    pub p3: f64,
    /// `z`–1 tie point.
    pub t_z1: f64,
    /// `a`–1 tie point.
    pub t_a1: f64,
    /// `z`–`a` tie point.
    pub t_za: f64,
    /// `p - p1`.
    pub x1: f64,
    /// `p - p2`.
    pub x2: f64,
    /// `p - p3`.
    pub x3: f64,
    /// Selected case (ties at `X_i = 0` resolved towards the positive side).
    pub case: CaseLabel,
    /// True when some `|X_i| ≤ 1e-12`.
    pub boundary: bool,
    /// All cases consistent with the signs when boundary values may take either sign.
    pub candidates: Vec<CaseLabel>,
}

/// `(p1, p2, p3)` exactly as defined.
pub fn critical_ps(core: &NormalizedCore) -> Result<(f64, f64, f64)> {
    if core.mu <= 0.0 {
        return Err(Error::Domain("mu = 0: critical p values undefined".into()));
    }
    let m = core.m as f64;
    let (a, mu) = (core.a, core.mu);
    Ok((
        (m + 1.0) / (2.0 * m * mu),
        (m + 1.0) * (a + 1.0) / (2.0 * m * mu + 2.0 * a),
        (m + 1.0) * (a + 1.0) / (2.0 * m * mu + 2.0),
    ))
}

/// `(t_z1, t_a1, t_za)`; singular at `p = (M+1)/2`.
pub fn cut_points(core: &NormalizedCore, p: f64) -> Result<(f64, f64, f64)> {
    let m = core.m as f64;
    let d = m + 1.0 - 2.0 * p;
    if d.abs() <= BOUNDARY_TOL || p <= 0.0 {
        return Err(Error::Domain(format!(
            "cut points singular at p = {p} (M+1-2p = {d})"
        )));
    }
    let (a, mu) = (core.a, core.mu);
    Ok((
        (m * (2.0 * p * mu - 1.0) - 1.0) / d,
        ((m + 1.0) * (a + 1.0) - 2.0 * m * mu * p) / (2.0 * p),
        (2.0 * m * mu * p - (m + 1.0) * a) / d,
    ))
}

/// Critical values, cut points and case label.
pub fn classify(core: &NormalizedCore, p: f64) -> Result<CaseReport> {
    let (p1, p2, p3) = critical_ps(core)?;
    let (t_z1, t_a1, t_za) = cut_points(core, p)?;
    let (x1, x2, x3) = (p - p1, p - p2, p - p3);
    let options = |x: f64| -> Vec<bool> {
        if x.abs() <= BOUNDARY_TOL {
            vec![false, true]
        } else {
            vec![x > 0.0]
        }
    };
    let mut candidates = Vec::new();
    for &s1 in &options(x1) {
        for &s2 in &options(x2) {
            for &s3 in &options(x3) {
                let c = CaseLabel::from_signs(s1, s2, s3);
                if !candidates.contains(&c) {
                    candidates.push(c);
                }
            }
        }
    }
    candidates.sort();
    let boundary = [x1, x2, x3].iter().any(|x| x.abs() <= BOUNDARY_TOL);
    let case = CaseLabel::from_signs(x1 >= -BOUNDARY_TOL, x2 > BOUNDARY_TOL, x3 >= -BOUNDARY_TOL);
    Ok(CaseReport {
        p1,
        p2,
        p3,
        t_z1,
        t_a1,
        t_za,
        x1,
        x2,
        x3,
        case,
        boundary,
        candidates,
    })
}

/// Evaluates the removal map of `case` at `z`. The flag reports a tie,
/// i.e. `z` within `1e-12` of one of the region boundaries in use.
pub fn removal_map(case: CaseLabel, r: &CaseReport, a: f64, z: f64) -> (RemovalTag, bool) {
    use RemovalTag::*;
    let near = |t: f64| (z - t).abs() <= BOUNDARY_TOL;
    match case {
        CaseLabel::A => (if z < 1.0 { RemoveOne } else { RemoveZ }, near(1.0)),
        CaseLabel::B => (
            if z > a && z < r.t_za { RemoveA } else { RemoveZ },
            near(a) || near(r.t_za),
        ),
        CaseLabel::C => (
            if z < r.t_z1 {
                RemoveZ
            } else if z < r.t_a1 {
                RemoveOne
            } else if z < r.t_za {
                RemoveA
            } else {
                RemoveZ
            },
            near(r.t_z1) || near(r.t_a1) || near(r.t_za),
        ),
        CaseLabel::D => (
            if z < r.t_z1 {
                RemoveZ
            } else if z < 1.0 {
                RemoveOne
            } else {
                RemoveZ
            },
            near(r.t_z1) || near(1.0),
        ),
        CaseLabel::E => (
            if z < r.t_a1 {
                RemoveOne
            } else if z < r.t_za {
                RemoveA
            } else {
                RemoveZ
            },
            near(r.t_a1) || near(r.t_za),
        ),
    }
}

/// The removal for a sample `z ∈ [0, 6]` under the case selected by [`classify`].
pub fn removal_for_sample(core: &NormalizedCore, p: f64, z: f64) -> Result<(RemovalTag, bool)> {
    if !(0.0..=6.0).contains(&z) {
        return Err(Error::Domain(format!("z = {z} outside [0, 6]")));
    }
    let r = classify(core, p)?;
    Ok(removal_map(r.case, &r, core.a, z))
}

/// Which core extreme is replaced in [`delta_h`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replaced {
    /// The minimum `a`.
    A,
    /// The maximum `1`.
    One,
}

/// The Lyapunov constant `k = M²(1-p)/(M-1)`.
pub fn lyapunov_k(m: u32, p: f64) -> f64 {
    let m = m as f64;
    m * m * (1.0 - p) / (m - 1.0)
}

/// `Δ_c(z) = (z-c)/M·[(M-1)z + (M+1)c - 2Mμ + (k/M)(z-c+2Mμ)]`, the change
/// of `h` when the core point `c ∈ {a, 1}` is replaced by `z`.
pub fn delta_h(core: &NormalizedCore, k: f64, z: f64, which: Replaced) -> f64 {
    let m = core.m as f64;
    let c = match which {
        Replaced::A => core.a,
        Replaced::One => 1.0,
    };
    (z - c) / m * ((m - 1.0) * z + (m + 1.0) * c - 2.0 * m * core.mu + k / m * (z - c + 2.0 * m * core.mu))
}

/// Closed-form `A_1..A_5` in any ordered field (`f64` or exact rationals).
pub fn drift_integrals<T>(a: T, mu: T, m: T, p: T) -> [T; 5]
where
    T: Clone + Num + Signed + FromPrimitive,
{
    std::array::from_fn(|j| drift_integral(j, a.clone(), mu.clone(), m.clone(), p.clone()))
}

/// Closed-form `A_{j+1}` alone (`j` is the zero-based case index).
///
/// With `u = z - c`, `Δ_c = (αu² + βu)/M` where `α = M-1+k/M` and
/// `β = 2M(c-μ) + 2kμ`, so `∫ Δ_c = (αu³/3 + βu²/2)/M`.
pub fn drift_integral<T>(j: usize, a: T, mu: T, m: T, p: T) -> T
where
    T: Clone + Num + Signed + FromPrimitive,
{
    let c = |n: i64| T::from_i64(n).expect("small integer");
    let one = c(1);
    let two = c(2);
    let k = m.clone() * m.clone() * (one.clone() - p.clone()) / (m.clone() - one.clone());
    let alpha = m.clone() - one.clone() + k.clone() / m.clone();
    let anti = |cc: &T, z: &T| -> T {
        let beta = two.clone() * m.clone() * (cc.clone() - mu.clone()) + two.clone() * k.clone() * mu.clone();
        let u = z.clone() - cc.clone();
        let u2 = u.clone() * u.clone();
        (alpha.clone() * u2.clone() * u / c(3) + beta * u2 / two.clone()) / m.clone()
    };
    let int = |cc: &T, lo: &T, hi: &T| anti(cc, hi) - anti(cc, lo);
    let d = || m.clone() + one.clone() - two.clone() * p.clone();
    let tz1 = || (m.clone() * (two.clone() * p.clone() * mu.clone() - one.clone()) - one.clone()) / d();
    let ta1 = || {
        ((m.clone() + one.clone()) * (a.clone() + one.clone()) - two.clone() * m.clone() * mu.clone() * p.clone())
            / (two.clone() * p.clone())
    };
    let tza = || (two.clone() * m.clone() * mu.clone() * p.clone() - (m.clone() + one.clone()) * a.clone()) / d();
    match j {
        0 => int(&one, &c(0), &one),
        1 => int(&a, &a, &tza()),
        2 => {
            let t = ta1();
            int(&one, &tz1(), &t) + int(&a, &t, &tza())
        }
        3 => int(&one, &tz1(), &one),
        4 => {
            let t = ta1();
            int(&one, &c(0), &t) + int(&a, &t, &tza())
        }
        _ => panic!("case index {j} outside 0..5"),
    }
}

/// Closed-form drift integrals and indicator products for one `(core, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftClosedForm {
    /// `A_1..A_5`.
    pub a: [f64; 5],
    /// `I_j = A_j · 1{case j}`; exactly one entry is potentially non-zero.
    pub i: [f64; 5],
    /// The case report used for the indicators.
    pub report: CaseReport,
}

impl DriftClosedForm {
    /// The active `I_j`.
    pub fn active(&self) -> f64 {
        self.i[self.report.case.index()]
    }
}

/// `A_1..A_5` and `I_1..I_5` for a core and `p`.
pub fn drift_closed_form(core: &NormalizedCore, p: f64) -> Result<DriftClosedForm> {
    let report = classify(core, p)?;
    let a = drift_integrals(core.a, core.mu, core.m as f64, p);
    let mut i = [0.0; 5];
    i[report.case.index()] = a[report.case.index()];
    Ok(DriftClosedForm { a, i, report })
}

/// Quadrature oracle: `∫_0^6 Δ(z) dz` where `Δ` is chosen pointwise by the
/// removal map of `case` (zero where `z` is removed). Returns the integral
/// and `∫_0^6 |Δ(z)| dz` as a scale for relative comparisons.
pub fn drift_quadrature_case(core: &NormalizedCore, p: f64, case: CaseLabel) -> Result<(f64, f64)> {
    let r = classify(core, p)?;
    let k = lyapunov_k(core.m, p);
    let f = |z: f64| match removal_map(case, &r, core.a, z).0 {
        RemovalTag::RemoveZ => 0.0,
        RemovalTag::RemoveA => delta_h(core, k, z, Replaced::A),
        RemovalTag::RemoveOne => delta_h(core, k, z, Replaced::One),
    };
    let breaks = [core.a, 1.0, r.t_z1, r.t_a1, r.t_za];
    let v = integrate_with_breaks(f, 0.0, 6.0, &breaks, 1e-12, 1e-15);
    let s = integrate_with_breaks(|z| f(z).abs(), 0.0, 6.0, &breaks, 1e-12, 1e-15);
    Ok((v, s))
}

/// [`drift_quadrature_case`] for the case selected by [`classify`].
pub fn drift_quadrature(core: &NormalizedCore, p: f64) -> Result<(f64, f64)> {
    let r = classify(core, p)?;
    drift_quadrature_case(core, p, r.case)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn core(a: f64, mu: f64, m: u32) -> NormalizedCore {
        NormalizedCore::new(a, mu, m).unwrap()
    }

    #[test]
    fn critical_values_for_equal_points() {
        let (p1, p2, p3) = critical_ps(&core(1.0, 1.0, 2)).unwrap();
        assert!((p1 - 0.75).abs() < 1e-15 && (p2 - 1.0).abs() < 1e-15 && (p3 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p2_for_two_point_cores() {
        for &a in &[0.0, 0.2, 0.5, 0.9] {
            let (_, p2, _) = critical_ps(&core(a, (1.0 + a) / 2.0, 2)).unwrap();
            assert!((p2 - (3.0 * a + 3.0) / (4.0 * a + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_mean_is_a_domain_error() {
        let c = NormalizedCore { a: 0.0, mu: 0.0, m: 3 };
        assert!(critical_ps(&c).is_err());
    }

    #[test]
    fn singular_cut_points() {
        assert!(cut_points(&core(0.2, 0.6, 3), 2.0).is_err());
    }

    #[test]
    fn tie_identities() {
        let c = core(0.3, 0.55, 4);
        let p = 0.8;
        let (tz1, ta1, _) = cut_points(&c, p).unwrap();
        let m = c.m as f64;
        let centre = |z: f64| p * (m * c.mu + z) / (m + 1.0);
        assert!((centre(tz1) - (tz1 + 1.0) / 2.0).abs() < 1e-12);
        assert!((centre(ta1) - (c.a + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn case_a_and_b_maps() {
        // Small p: case A.
        let c = core(0.5, 0.75, 2);
        let r = classify(&c, 0.76).unwrap();
        assert_eq!(r.case, CaseLabel::A);
        assert_eq!(removal_map(r.case, &r, c.a, 0.5).0, RemovalTag::RemoveOne);
        // p above p2 (only reachable for p > 1): case B.
        let c = core(0.2, 0.7, 3);
        let r = classify(&c, 1.2).unwrap();
        assert_eq!(r.case, CaseLabel::B);
        assert!(r.t_za < 5.9);
        assert_eq!(removal_map(r.case, &r, c.a, 5.9).0, RemovalTag::RemoveZ);
    }

    #[test]
    fn equal_points_never_reach_case_b() {
        let c = core(1.0, 1.0, 2);
        for i in 0..100 {
            let p = 0.75 + 0.25 * i as f64 / 100.0;
            assert!(classify(&c, p).unwrap().x2 < 0.0);
        }
    }

    #[test]
    fn delta_vanishes_at_replaced_point() {
        let c = core(0.2, 0.5, 3);
        let k = lyapunov_k(3, 0.9);
        assert_eq!(delta_h(&c, k, c.a, Replaced::A), 0.0);
        assert_eq!(delta_h(&c, k, 1.0, Replaced::One), 0.0);
    }

    #[test]
    fn two_point_cores_have_no_case_b_drift() {
        for i in 1..50 {
            let a = i as f64 / 50.0;
            let c = core(a, (1.0 + a) / 2.0, 2);
            for j in 1..20 {
                let p = 0.75 + 0.25 * j as f64 / 20.0;
                assert_eq!(drift_closed_form(&c, p).unwrap().i[1], 0.0);
            }
        }
    }

    #[test]
    fn realized_core_has_the_requested_statistics() {
        let c = core(0.1, 0.4, 5);
        let pts = c.realize();
        assert_eq!(pts.len(), 5);
        let mean = pts.iter().sum::<f64>() / 5.0;
        assert!((mean - 0.4).abs() < 1e-12);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[4], 1.0);
    }
}
