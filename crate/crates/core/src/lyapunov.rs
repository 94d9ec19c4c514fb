//! Lyapunov functions of the core and their drift.
//!
//! * `h = F + kμ²` with `F = Σ(y_i - μ)²` and `k = M²(1-p)/(M-1)`, the
//!   supermartingale for `p < 1` in the borderless chain;
//! * `h(x, y) = -2 ln max(x, y/2)` for `N = 3`, `p > 1`, near zero;
//! * the kernel `Λ(a, b)`, the integral of the `h(x, y)` increment over the
//!   four windows where a new point survives when the core is `(a, b)` and
//!   `p = 1`; its non-positivity on `0 < a ≤ b ≤ 1/2` gives the drift sign.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{rng_for, step, Mode, ProcessParams, SortedCore};
use crate::quadrature::integrate_with_breaks;

/// `k = M²(1-p)/(M-1)`.
pub fn lyapunov_k(m: usize, p: f64) -> f64 {
    let m = m as f64;
    m * m * (1.0 - p) / (m - 1.0)
}

/// `Σ(y_i - μ)² + kμ²` for a core of `M = points.len()` points.
pub fn h_general(points: &[f64], p: f64) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Usage("h needs at least 2 points".into()));
    }
    let m = points.len();
    let mu = points.iter().sum::<f64>() / m as f64;
    let f: f64 = points.iter().map(|y| (y - mu) * (y - mu)).sum();
    Ok(f + lyapunov_k(m, p) * mu * mu)
}

/// `-2 ln max(x, y/2)`; `+∞` when both arguments are non-positive.
pub fn h_pair(x: f64, y: f64) -> f64 {
    let m = x.max(0.5 * y);
    if m <= 0.0 {
        f64::INFINITY
    } else {
        -2.0 * m.ln()
    }
}

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a <= b && b <= 0.5) {
        return Err(Error::Domain(format!("need 0 < a <= b <= 1/2, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Which closed-form branch of `Λ` applies: `a ≤ b/3`, `≤ b/2`, `≤ 2b/3`, `≤ b`.
pub fn lambda_branch(a: f64, b: f64) -> u8 {
    if a <= b / 3.0 {
        1
    } else if a <= b / 2.0 {
        2
    } else if a <= 2.0 * b / 3.0 {
        3
    } else {
        4
    }
}

/// The branch formula `i ∈ 1..=4` evaluated regardless of the branch condition.
pub fn lambda_branch_formula(i: u8, a: f64, b: f64) -> f64 {
    let l2 = std::f64::consts::LN_2;
    let s = a + b;
    match i {
        1 => 3.0 * (a - b) * l2 - 3.0 * a + 2.0 * b,
        2 => s * s.ln() - s * a.ln() + (a - 5.0 * b) * l2 + b,
        3 => s * s.ln() + (2.0 * a - 4.0 * b) * b.ln() + 3.0 * (b - a) * a.ln() + (b - 5.0 * a) * l2 + b,
        _ => {
            let t = if 4.0 * a - 2.0 * b == 0.0 { 0.0 } else { (4.0 * a - 2.0 * b) * (2.0 * a - b).ln() };
            s * s.ln() + (2.0 * a - 4.0 * b) * b.ln() + (5.0 * b - 7.0 * a) * a.ln() - s * l2 + 3.0 * (b - a) + t
        }
    }
}

/// Closed-form `Λ(a, b)` on `0 < a ≤ b ≤ 1/2`.
pub fn lambda_closed(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    Ok(lambda_branch_formula(lambda_branch(a, b), a, b))
}

/// `Λ(a, b)` by adaptive quadrature of the four `h_pair` increments:
/// new point `x` in `((2a-b)⁺, a)` keeps `(x, a)`, in `(a, (a+b)/2)` keeps
/// `(a, x)`, in `((a+b)/2, b)` keeps `(x, b)`, in `(b, 2b-a)` keeps `(b, x)`.
pub fn lambda_quadrature(a: f64, b: f64) -> Result<f64> {
    check_ab(a, b)?;
    let h0 = h_pair(a, b);
    let mid = 0.5 * (a + b);
    let (rel, abs) = (1e-13, 1e-16);
    let kinks = [a / 2.0, 2.0 * a, b / 2.0, 2.0 * b];
    let i1 = integrate_with_breaks(|x| h_pair(x, a) - h0, (2.0 * a - b).max(0.0), a, &kinks, rel, abs);
    let i2 = integrate_with_breaks(|x| h_pair(a, x) - h0, a, mid, &kinks, rel, abs);
    let i3 = integrate_with_breaks(|x| h_pair(x, b) - h0, mid, b, &kinks, rel, abs);
    let i4 = integrate_with_breaks(|x| h_pair(b, x) - h0, b, 2.0 * b - a, &kinks, rel, abs);
    Ok(i1 + i2 + i3 + i4)
}

/// The positivity families for `Λ(bν, b)`: branch 1 is `C₁` on `[1/3, 1/2]`,
/// branch 2 is `C₂` on `[1/2, 2/3]`, branch 3 is `C₃` on `[2/3, 1]`.
pub fn c_family(branch: u8, nu: f64) -> Result<f64> {
    let l2 = std::f64::consts::LN_2;
    let (lo, hi) = match branch {
        1 => (1.0 / 3.0, 0.5),
        2 => (0.5, 2.0 / 3.0),
        3 => (2.0 / 3.0, 1.0),
        _ => return Err(Error::Domain(format!("C-family branch {branch} not in 1..=3"))),
    };
    let slack = 1e-12;
    if !(nu >= lo - slack && nu <= hi + slack) {
        return Err(Error::Domain(format!("nu = {nu} outside [{lo}, {hi}] for branch {branch}")));
    }
    Ok(match branch {
        1 => (1.0 + nu) * (nu / (1.0 + nu)).ln() + (5.0 - nu) * l2 - 1.0,
        2 => -(1.0 + nu) * (1.0 + nu).ln() + (3.0 * nu - 3.0) * nu.ln() - 1.0 + (5.0 * nu - 1.0) * l2,
        _ => {
            let t = 2.0 * nu - 1.0;
            nu * (2.0 * nu.powi(7) / (t.powi(4) * (nu + 1.0))).ln()
                + (2.0 * t * t / (nu.powi(5) * (nu + 1.0))).ln()
                + 3.0 * (nu - 1.0)
        }
    })
}

/// Exact conditional drift of `h_pair` for `N = 3`: the core is `(a, b)`,
/// the new point is uniform on `[0, 2ε]` and the removal uses `p`. The
/// integrand applies the removal rule directly to `{a, b, x}`, so at `p = 1`
/// it is an independent oracle for `φ·Λ` with `φ = 1/(2ε)`.
pub fn pair_conditional_drift(a: f64, b: f64, eps: f64, p: f64) -> Result<f64> {
    check_ab(a, b)?;
    if !(eps > 0.0 && 2.0 * eps <= 1.0) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 1/2]")));
    }
    let h0 = h_pair(a, b);
    let g = |x: f64| {
        // Coin is irrelevant: ties occur only on a null set of x.
        let r = crate::process::remove_extreme(&[a, b, x], p, || true).expect("three points");
        let s = r.survivors.points();
        h_pair(s[0], s[1]) - h0
    };
    let mut breaks = vec![(2.0 * a - b).max(0.0), a, 0.5 * (a + b), b, 2.0 * b - a];
    breaks.extend([a / 2.0, 2.0 * a, b / 2.0, 2.0 * b]);
    breaks.extend(tie_points_pair(a, b, p));
    let v = integrate_with_breaks(g, 0.0, 2.0 * eps, &breaks, 1e-13, 1e-16);
    Ok(v / (2.0 * eps))
}

/// Values of the new point `x` at which the removal from `{a, b, x}` ties
/// for multiplier `p` (each ordering of `x` relative to `a ≤ b`).
fn tie_points_pair(a: f64, b: f64, p: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let c = p / 3.0;
    // x ≤ a: extremes x and b; tie when c(a+b+x) = (x+b)/2.
    // a ≤ x ≤ b: extremes a and b; the tie does not depend on x except via the mean.
    // x ≥ b: extremes a and x; tie when c(a+b+x) = (a+x)/2.
    // Each is linear in x: c·x - x/2 = rhs.
    let d = c - 0.5;
    if d.abs() > 1e-15 {
        out.push((0.5 * b - c * (a + b)) / d);
        out.push((0.5 * a - c * (a + b)) / d);
        // Middle ordering: c(a+b+x) = (a+b)/2.
        if c > 0.0 {
            out.push(0.5 * (a + b) / c - (a + b));
        }
    }
    out.into_iter().filter(|x| x.is_finite()).collect()
}

/// Which Lyapunov function to track.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HChoice {
    /// `F + kμ²` along the borderless chain.
    General,
    /// `-2 ln max(x_(1), x_(2)/2)` for `N = 3`.
    Pair,
}

impl HChoice {
    /// Parses `general` or `pair`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "general" => Ok(HChoice::General),
            "pair" => Ok(HChoice::Pair),
            other => Err(Error::Usage(format!("unknown h {other:?} (general | pair)"))),
        }
    }
}

/// States on which the drift is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// Every state.
    All,
    /// States with `x_(N-1) ≤ ε`.
    MaxAtMost(f64),
}

impl Region {
    fn contains(&self, core: &[f64]) -> bool {
        match self {
            Region::All => true,
            Region::MaxAtMost(e) => core.iter().all(|x| x <= e),
        }
    }
}

/// Outcome of the one-sided supermartingale test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftVerdict {
    /// `mean ≤ 2.33·stderr`.
    ConsistentWithSupermartingale,
    /// `mean > 2.33·stderr`.
    Violated,
    /// The region was not hit often enough within the attempt budget.
    Inconclusive,
}

/// One-sided 99% normal quantile.
pub const Z99: f64 = 2.33;

/// Monte Carlo drift estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftReport {
    /// Lyapunov function used.
    pub h: HChoice,
    /// Conditioning region.
    pub region: Region,
    /// `N`.
    pub n: usize,
    /// `p`.
    pub p: f64,
    /// Conditioned steps actually used.
    pub samples: u64,
    /// State draws including rejected ones.
    pub attempts: u64,
    /// Mean increment of `h`.
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Verdict.
    pub verdict: DriftVerdict,
    /// Seed.
    pub seed: u64,
}

/// Number of independent substreams a drift estimate is split into; fixed so
/// the result does not depend on the worker count.
pub const DRIFT_CHUNKS: u64 = 64;

/// Estimates `E[h(next core) - h(core)]` over i.i.d. states in `region`.
///
/// States: `N-1` i.i.d. uniform points on `[0, 1]`, kept when they fall in
/// `region` (rejection sampling). One step of the chain is taken from each
/// state — borderless for [`HChoice::General`], uniform `ζ` on `[0, 1]` for
/// [`HChoice::Pair`]. At most `max_attempts` states are drawn in total.
pub fn empirical_drift(
    params: &ProcessParams,
    h: HChoice,
    region: Region,
    samples: u64,
    max_attempts: u64,
    seed: u64,
) -> Result<DriftReport> {
    match h {
        HChoice::General if params.mode != Mode::Borderless => {
            return Err(Error::Usage("h = general requires borderless mode".into()))
        }
        HChoice::Pair if params.n != 3 => return Err(Error::Usage("h = pair requires N = 3".into())),
        _ => {}
    }
    if samples < 2 {
        return Err(Error::Usage("need at least 2 samples".into()));
    }
    let m = params.n - 1;
    let hval = |pts: &[f64]| -> f64 {
        match h {
            HChoice::General => h_general(pts, params.p).expect("M >= 2"),
            HChoice::Pair => h_pair(pts[0], pts[1]),
        }
    };
    let chunk = |c: u64| -> Result<(u64, u64, f64, f64)> {
        let want = samples / DRIFT_CHUNKS + u64::from(c < samples % DRIFT_CHUNKS);
        let budget = max_attempts / DRIFT_CHUNKS + u64::from(c < max_attempts % DRIFT_CHUNKS);
        let mut rng = rng_for(seed, c);
        let (mut got, mut tries, mut s, mut s2) = (0u64, 0u64, 0.0f64, 0.0f64);
        let mut pts = vec![0.0; m];
        while got < want && tries < budget {
            tries += 1;
            for x in pts.iter_mut() {
                *x = rng.random::<f64>();
            }
            if !region.contains(&pts) {
                continue;
            }
            let core = SortedCore::new(pts.clone())?;
            let before = hval(core.points());
            let (next, _) = step(&core, params, &mut rng, 0)?;
            let d = hval(next.points()) - before;
            got += 1;
            s += d;
            s2 += d * d;
        }
        Ok((got, tries, s, s2))
    };
    let parts: Vec<(u64, u64, f64, f64)> = (0..DRIFT_CHUNKS).into_par_iter().map(chunk).collect::<Result<_>>()?;
    let (mut n, mut tries, mut s, mut s2) = (0u64, 0u64, 0.0, 0.0);
    for (g, t, a, b) in parts {
        n += g;
        tries += t;
        s += a;
        s2 += b;
    }
    let (mean, stderr) = if n >= 2 {
        let nf = n as f64;
        let mean = s / nf;
        let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (mean, (var / nf).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    let verdict = if n < samples {
        DriftVerdict::Inconclusive
    } else if mean <= Z99 * stderr {
        DriftVerdict::ConsistentWithSupermartingale
    } else {
        DriftVerdict::Violated
    };
    Ok(DriftReport {
        h,
        region,
        n: params.n,
        p: params.p,
        samples: n,
        attempts: tries,
        mean,
        stderr,
        verdict,
        seed,
    })
}
