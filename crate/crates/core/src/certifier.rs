//! The Box method: certified lower bounds for polynomials on the unit cube.
//!
//! Write `f = f₊ - f₋` with `f₊, f₋` having non-negative coefficients. Both
//! are non-decreasing in every coordinate on `[0,1]^d`, so on the cell
//! `∏[i_j/M, (i_j+1)/M]` we have `f ≥ f₊(i/M) - f₋((i+1)/M)`. The minimum of
//! that quantity over all `M^d` cells, `G_{f,M}`, is a rigorous lower bound for
//! `min f`.
//!
//! Evaluation is exact. All coefficients are scaled by `L·M^D` (`L` the lcm of
//! coefficient denominators, `D` the total degree), which turns every cell
//! value into an integer polynomial in the cell indices. For each fixed
//! `(i₁, i₂)` the value is a polynomial in `i₃` (the `f₋` part expanded from
//! `i₃+1` by the binomial theorem) and is swept with forward differences, so
//! the innermost loop is additions only. The integer type is chosen from an
//! a-priori magnitude bound: `i128`, 256-bit, 512-bit, else arbitrary precision.

use std::fmt;
use std::time::Instant;

use bnum::types::{I256, I512};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Poly, Rat, Var};
use crate::error::{Error, Result};

/// Default cap on the number of grid cells of one uniform run.
pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000_000;

/// `f = f₊ - f₋` with both parts having non-negative coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSplit {
    /// Terms with positive coefficients.
    pub f_plus: Poly,
    /// Negated terms with negative coefficients.
    pub f_minus: Poly,
}

/// Partitions the terms of `f` by coefficient sign.
pub fn sign_split(f: &Poly) -> SignSplit {
    let (f_plus, f_minus) = f.sign_parts();
    SignSplit { f_plus, f_minus }
}

/// Integer arithmetic used by the grid sweep.
trait GridInt: Clone + Ord + Send + Sync {
    const NAME: &'static str;
    fn from_big(b: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn add_ref(&mut self, o: &Self);
    fn mul_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
}

impl GridInt for i128 {
    const NAME: &'static str = "i128";
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("magnitude bound guarantees i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    #[inline(always)]
    fn add_ref(&mut self, o: &Self) {
        *self += *o;
    }
    #[inline(always)]
    fn mul_ref(&self, o: &Self) -> Self {
        *self * *o
    }
    #[inline(always)]
    fn sub_ref(&self, o: &Self) -> Self {
        *self - *o
    }
}

impl GridInt for I256 {
    const NAME: &'static str = "i256";
    fn from_big(b: &BigInt) -> Self {
        b.to_string().parse().expect("magnitude bound guarantees 256 bits")
    }
    fn to_big(&self) -> BigInt {
        self.to_string().parse().expect("decimal round trip")
    }
    #[inline(always)]
    fn add_ref(&mut self, o: &Self) {
        *self += *o;
    }
    #[inline(always)]
    fn mul_ref(&self, o: &Self) -> Self {
        *self * *o
    }
    #[inline(always)]
    fn sub_ref(&self, o: &Self) -> Self {
        *self - *o
    }
}

impl GridInt for I512 {
    const NAME: &'static str = "i512";
    fn from_big(b: &BigInt) -> Self {
        b.to_string().parse().expect("magnitude bound guarantees 512 bits")
    }
    fn to_big(&self) -> BigInt {
        self.to_string().parse().expect("decimal round trip")
    }
    #[inline(always)]
    fn add_ref(&mut self, o: &Self) {
        *self += *o;
    }
    #[inline(always)]
    fn mul_ref(&self, o: &Self) -> Self {
        *self * *o
    }
    #[inline(always)]
    fn sub_ref(&self, o: &Self) -> Self {
        *self - *o
    }
}

impl GridInt for BigInt {
    const NAME: &'static str = "bigint";
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn add_ref(&mut self, o: &Self) {
        *self += o;
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
}

/// The polynomial in up to three cube variables, with exact integer
/// coefficients after scaling.
struct Scaled {
    axes: Vec<Var>,
    deg: [usize; 3],
    /// `L · M^D`.
    scale: BigInt,
    /// Dense `[e1][e2][e3]` coefficients of the scaled `f₊` and `f₋`.
    plus: Vec<BigInt>,
    minus: Vec<BigInt>,
}

impl Scaled {
    fn idx(&self, e1: usize, e2: usize, e3: usize) -> usize {
        (e1 * (self.deg[1] + 1) + e2) * (self.deg[2] + 1) + e3
    }
}

fn cube_axes(f: &Poly) -> Result<Vec<Var>> {
    let vars = f.vars();
    if vars.len() > 3 {
        return Err(Error::Usage(format!(
            "the Box method needs at most 3 variables, got {}",
            vars.len()
        )));
    }
    Ok(vars)
}

/// Scales `f` so that evaluation at `x_j = u_j / q` times `L·q^D` is an
/// integer polynomial in `u`.
fn scale_poly(f: &Poly, q: &BigInt) -> Result<Scaled> {
    let axes = cube_axes(f)?;
    let mut deg = [0usize; 3];
    for (j, v) in axes.iter().enumerate() {
        deg[j] = f.degree(*v) as usize;
    }
    let total_degree = f.terms().map(|(e, _)| axes.iter().map(|v| e[v.index()] as u32).sum::<u32>()).max().unwrap_or(0);
    let l = f.denominator_lcm();
    let size = (deg[0] + 1) * (deg[1] + 1) * (deg[2] + 1);
    let mut s = Scaled {
        axes: axes.clone(),
        deg,
        scale: &l * num_traits::pow(q.clone(), total_degree as usize),
        plus: vec![BigInt::zero(); size],
        minus: vec![BigInt::zero(); size],
    };
    for (e, c) in f.terms() {
        let mut ex = [0usize; 3];
        for (j, v) in axes.iter().enumerate() {
            ex[j] = e[v.index()] as usize;
        }
        let d: u32 = ex.iter().map(|&x| x as u32).sum();
        let k = c * Rat::from_integer(l.clone() * num_traits::pow(q.clone(), (total_degree - d) as usize));
        debug_assert!(k.is_integer());
        let k = k.to_integer();
        let i = s.idx(ex[0], ex[1], ex[2]);
        if k.is_negative() {
            s.minus[i] -= k;
        } else {
            s.plus[i] += k;
        }
    }
    Ok(s)
}

/// Exact result of a uniform-grid run.
#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// `G_{f,M}`.
    pub bound: Rat,
    /// Lexicographically first cell attaining the minimum (absent axes 0).
    pub argmin: [u64; 3],
    /// Number of cells evaluated.
    pub cells: u64,
    /// Chunks the first axis was split into.
    pub chunks: usize,
    /// Integer type used in the sweep.
    pub int_type: &'static str,
    /// Variables mapped to the cube axes, in order.
    pub axes: Vec<Var>,
}

/// `G_{f,M}` with default chunking and cell budget.
pub fn grid_lower_bound(f: &Poly, m: u64) -> Result<Rat> {
    Ok(grid_lower_bound_with(f, m, 0, DEFAULT_CELL_BUDGET)?.bound)
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `G_{f,M}`: `chunks = 0` picks a default; fails with a budget error when
/// the number of cells exceeds `cell_budget`.
pub fn grid_lower_bound_with(f: &Poly, m: u64, chunks: usize, cell_budget: u64) -> Result<GridResult> {
    if m == 0 {
        return Err(Error::Usage("grid resolution M must be at least 1".into()));
    }
    let mb = BigInt::from(m);
    let s = scale_poly(f, &mb)?;
    let n_axis: Vec<u64> = (0..3).map(|j| if s.deg[j] == 0 { 1 } else { m }).collect();
    let cells = n_axis.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n)).unwrap_or(u64::MAX);
    if cells > cell_budget {
        return Err(Error::Budget(format!(
            "{cells} cells exceed the budget of {cell_budget}"
        )));
    }
    // A-priori bound on every intermediate magnitude of the sweep.
    let sum: BigInt = s.plus.iter().chain(&s.minus).sum();
    let d3 = s.deg[2];
    let spread = BigInt::from(m + d3 as u64 + 1);
    let bound = sum
        * num_traits::pow(spread, s.deg[0] + s.deg[1] + d3)
        * num_traits::pow(BigInt::from(4), d3)
        * BigInt::from(d3 + 1)
        * BigInt::from(16);
    let bits = bound.bits();
    let chunks = if chunks == 0 { 64 } else { chunks }.min(n_axis[0] as usize).max(1);
    let (min, argmin, ty) = if bits < 126 {
        sweep::<i128>(&s, m, &n_axis, chunks)
    } else if bits < 254 {
        sweep::<I256>(&s, m, &n_axis, chunks)
    } else if bits < 510 {
        sweep::<I512>(&s, m, &n_axis, chunks)
    } else {
        sweep::<BigInt>(&s, m, &n_axis, chunks)
    };
    Ok(GridResult {
        bound: Rat::new(min, s.scale.clone()),
        argmin,
        cells,
        chunks,
        int_type: ty,
        axes: s.axes.clone(),
    })
}

fn sweep<T: GridInt>(s: &Scaled, m: u64, n_axis: &[u64], chunks: usize) -> (BigInt, [u64; 3], &'static str) {
    let [d1, d2, d3] = s.deg;
    let conv = |v: &[BigInt]| v.iter().map(T::from_big).collect::<Vec<T>>();
    let plus = conv(&s.plus);
    let minus = conv(&s.minus);
    let zero = T::from_big(&BigInt::zero());
    // pw[axis][i * (d+1) + e] = i^e for i in 0..=M.
    let pw: Vec<Vec<T>> = (0..3)
        .map(|j| {
            let d = s.deg[j];
            let mut t = Vec::with_capacity((m as usize + 1) * (d + 1));
            for i in 0..=m {
                let mut x = BigInt::one();
                for _ in 0..=d {
                    t.push(T::from_big(&x));
                    x *= i;
                }
            }
            t
        })
        .collect();
    let binoms: Vec<Vec<T>> = (0..=d3).map(|k| (0..=d3).map(|j| T::from_big(&binom(k, j))).collect()).collect();
    // t^j for t in 0..=d3, used to seed the forward-difference table.
    let small_pw: Vec<Vec<T>> = (0..=d3)
        .map(|t| (0..=d3).map(|j| T::from_big(&num_traits::pow(BigInt::from(t), j))).collect())
        .collect();
    let idx = |e1: usize, e2: usize, e3: usize| (e1 * (d2 + 1) + e2) * (d3 + 1) + e3;

    let n1 = n_axis[0] as usize;
    let ranges: Vec<(usize, usize)> = (0..chunks).map(|c| (c * n1 / chunks, (c + 1) * n1 / chunks)).collect();

    let work = |&(lo, hi): &(usize, usize)| -> Option<(T, [u64; 3])> {
        let mut best: Option<(T, [u64; 3])> = None;
        let w2 = d3 + 1;
        let mut dp = vec![zero.clone(); (d2 + 1) * w2];
        let mut dm = vec![zero.clone(); (d2 + 1) * w2];
        let mut a = vec![zero.clone(); w2];
        let mut b = vec![zero.clone(); w2];
        let mut r = vec![zero.clone(); w2];
        let mut diff = vec![zero.clone(); w2];
        for i1 in lo..hi {
            for e2 in 0..=d2 {
                for e3 in 0..=d3 {
                    let mut sp = zero.clone();
                    let mut sm = zero.clone();
                    for e1 in 0..=d1 {
                        sp.add_ref(&plus[idx(e1, e2, e3)].mul_ref(&pw[0][i1 * (d1 + 1) + e1]));
                        sm.add_ref(&minus[idx(e1, e2, e3)].mul_ref(&pw[0][(i1 + 1) * (d1 + 1) + e1]));
                    }
                    dp[e2 * w2 + e3] = sp;
                    dm[e2 * w2 + e3] = sm;
                }
            }
            for i2 in 0..n_axis[1] as usize {
                for k in 0..=d3 {
                    let mut sa = zero.clone();
                    let mut sb = zero.clone();
                    for e2 in 0..=d2 {
                        sa.add_ref(&dp[e2 * w2 + k].mul_ref(&pw[1][i2 * (d2 + 1) + e2]));
                        sb.add_ref(&dm[e2 * w2 + k].mul_ref(&pw[1][(i2 + 1) * (d2 + 1) + e2]));
                    }
                    a[k] = sa;
                    b[k] = sb;
                }
                // r(i3) = A(i3) - B(i3 + 1) as a polynomial in i3.
                for j in 0..=d3 {
                    let mut acc = zero.clone();
                    for k in j..=d3 {
                        acc.add_ref(&b[k].mul_ref(&binoms[k][j]));
                    }
                    r[j] = a[j].sub_ref(&acc);
                }
                if d3 == 0 {
                    let v = r[0].clone();
                    if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                        best = Some((v, [i1 as u64, i2 as u64, 0]));
                    }
                    continue;
                }
                // Forward-difference table at i3 = 0.
                for t in 0..=d3 {
                    let mut v = zero.clone();
                    for j in 0..=d3 {
                        v.add_ref(&r[j].mul_ref(&small_pw[t][j]));
                    }
                    diff[t] = v;
                }
                for level in 1..=d3 {
                    for t in (level..=d3).rev() {
                        diff[t] = diff[t].sub_ref(&diff[t - 1]);
                    }
                }
                let mut local_min = diff[0].clone();
                let mut local_arg = 0u64;
                for i3 in 0..m {
                    if diff[0] < local_min {
                        local_min = diff[0].clone();
                        local_arg = i3;
                    }
                    for t in 0..d3 {
                        let (x, y) = diff.split_at_mut(t + 1);
                        x[t].add_ref(&y[0]);
                    }
                }
                if best.as_ref().is_none_or(|(bv, _)| local_min < *bv) {
                    best = Some((local_min, [i1 as u64, i2 as u64, local_arg]));
                }
            }
        }
        best
    };
    let parts: Vec<Option<(T, [u64; 3])>> = ranges.par_iter().map(work).collect();
    let mut best: Option<(T, [u64; 3])> = None;
    for (v, c) in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, c));
        }
    }
    let (v, c) = best.expect("at least one cell");
    (v.to_big(), c, T::NAME)
}

/// Certification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The bound clears the threshold (or is `≥ 0` without a threshold).
    CertifiedPositive,
    /// The bound does not clear the threshold.
    Failed,
}

/// Certificate of one uniform-grid run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCertificate {
    /// Polynomial identifier.
    pub poly: String,
    /// Cube variables in axis order.
    pub vars: Vec<String>,
    /// Grid resolution `M`.
    pub grid: u64,
    /// Exact `G_{f,M}` as `"num/den"`.
    pub bound: String,
    /// `G_{f,M}` rounded to `f64` for reading.
    pub bound_approx: f64,
    /// Strict integer threshold the bound must exceed, if any.
    pub threshold: Option<i64>,
    /// Verdict.
    pub verdict: Verdict,
    /// Cell attaining the minimum.
    pub argmin_cell: [u64; 3],
    /// Cells evaluated.
    pub cells: u64,
    /// Chunks of the first axis.
    pub chunks: usize,
    /// Integer type of the sweep.
    pub int_type: String,
    /// Elapsed seconds (the only field that varies between identical runs).
    pub wall_time_s: f64,
}

/// `num/den` rendering of an exact rational.
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Verdict for `bound` against an optional strict threshold.
pub fn verdict_for(bound: &Rat, threshold: Option<i64>) -> Verdict {
    let ok = match threshold {
        Some(t) => *bound > Rat::from_integer(BigInt::from(t)),
        None => !bound.is_negative(),
    };
    if ok {
        Verdict::CertifiedPositive
    } else {
        Verdict::Failed
    }
}

/// Runs the uniform grid and wraps the result in a certificate.
pub fn certify_uniform(
    name: &str,
    f: &Poly,
    m: u64,
    threshold: Option<i64>,
    chunks: usize,
    cell_budget: u64,
) -> Result<GridCertificate> {
    let t0 = Instant::now();
    let r = grid_lower_bound_with(f, m, chunks, cell_budget)?;
    Ok(GridCertificate {
        poly: name.to_string(),
        vars: r.axes.iter().map(|v| v.name().to_string()).collect(),
        grid: m,
        bound: rat_string(&r.bound),
        bound_approx: r.bound.to_f64().unwrap_or(f64::NAN),
        threshold,
        verdict: verdict_for(&r.bound, threshold),
        argmin_cell: r.argmin,
        cells: r.cells,
        chunks: r.chunks,
        int_type: r.int_type.to_string(),
        wall_time_s: t0.elapsed().as_secs_f64(),
    })
}

/// The certification table: `(poly, M, strict threshold)`.
pub const TABLE: [(&str, u64, i64); 8] = [
    ("e1", 2000, 825),
    ("e2", 500, 25),
    ("e3", 400, 1860),
    ("e4", 300, 2397),
    ("e5", 200, 672),
    ("e6", 200, 148),
    ("e7", 200, 5),
    ("e8", 400, 3),
];

/// Table entry for `name`.
pub fn table_entry(name: &str) -> Option<(u64, i64)> {
    TABLE.iter().find(|(n, _, _)| *n == name).map(|&(_, m, t)| (m, t))
}

/// `e1..e8` transported to the unit cube (`p = (1+x1)/2`, `b = x2`, `μ = x3`).
pub fn box_polynomials() -> Result<Vec<(String, Poly)>> {
    let c = crate::algebra::derive_corpus()?;
    Ok((1..=8).map(|j| (format!("e{j}"), c[&format!("box_e{j}")].clone())).collect())
}

/// Certifies the table entries whose names are listed (all when `names` is empty).
pub fn certify_table(names: &[&str], chunks: usize, cell_budget: u64) -> Result<Vec<GridCertificate>> {
    let polys = box_polynomials()?;
    let mut out = Vec::new();
    for &(name, m, thr) in TABLE.iter() {
        if !names.is_empty() && !names.contains(&name) {
            continue;
        }
        let f = &polys.iter().find(|(n, _)| n == name).expect("e1..e8 derived").1;
        out.push(certify_uniform(name, f, m, Some(thr), chunks, cell_budget)?);
    }
    Ok(out)
}

/// An axis-aligned dyadic box `∏[lo_j/2^K, hi_j/2^K]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicBox {
    /// Lower corners (numerators).
    pub lo: Vec<u64>,
    /// Upper corners (numerators).
    pub hi: Vec<u64>,
    /// Common denominator exponent `K`.
    pub log2_den: u32,
    /// Number of splits that produced the box.
    pub depth: u32,
}

impl DyadicBox {
    /// Corners as floating-point intervals.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let d = (self.log2_den as f64).exp2();
        self.lo.iter().zip(&self.hi).map(|(&l, &h)| (l as f64 / d, h as f64 / d)).collect()
    }
}

impl fmt::Display for DyadicBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals().iter().map(|(l, h)| format!("[{l}, {h}]")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Outcome of branch-and-bound certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AdaptiveOutcome {
    /// Every leaf box has `f₊(lo) - f₋(hi) ≥ 0`.
    Certified {
        /// Box evaluations performed.
        evals: u64,
        /// Accepted leaf boxes.
        leaves: u64,
        /// Deepest accepted box.
        max_depth: u32,
    },
    /// A box at the depth limit could not be accepted.
    Inconclusive {
        /// Box evaluations performed.
        evals: u64,
        /// The unresolved box.
        witness: DyadicBox,
        /// `f₊(lo) - f₋(hi)` on the witness.
        witness_bound: f64,
    },
}

/// Branch and bound over dyadic sub-boxes of `[0,1]^d`: a box is accepted
/// when `f₊(lo) - f₋(hi) ≥ 0`; otherwise its longest side is halved and the
/// child with the larger bound is explored first. Depth-first diving into the
/// more promising child drives an unresolved box towards the boundary of the
/// region where `f` may be negative, e.g. towards a zero locus.
pub fn adaptive_certify(f: &Poly, max_depth: u32) -> Result<AdaptiveOutcome> {
    if max_depth > 60 {
        return Err(Error::Usage("max_depth must be at most 60".into()));
    }
    let k = max_depth;
    let q = BigInt::one() << k;
    let s = scale_poly(f, &q)?;
    let d = s.axes.len();
    let full = 1u64 << k;
    // Sparse term lists of the scaled parts.
    let mut terms_p = Vec::new();
    let mut terms_m = Vec::new();
    for e1 in 0..=s.deg[0] {
        for e2 in 0..=s.deg[1] {
            for e3 in 0..=s.deg[2] {
                let i = s.idx(e1, e2, e3);
                if !s.plus[i].is_zero() {
                    terms_p.push(([e1, e2, e3], s.plus[i].clone()));
                }
                if !s.minus[i].is_zero() {
                    terms_m.push(([e1, e2, e3], s.minus[i].clone()));
                }
            }
        }
    }
    let deg = s.deg;
    let eval = |terms: &[([usize; 3], BigInt)], u: &[u64]| -> BigInt {
        // Per-axis power tables, then one product per term.
        let pw: Vec<Vec<BigInt>> = (0..d)
            .map(|j| {
                let mut t = Vec::with_capacity(deg[j] + 1);
                let mut x = BigInt::one();
                for _ in 0..=deg[j] {
                    t.push(x.clone());
                    x *= u[j];
                }
                t
            })
            .collect();
        let mut acc = BigInt::zero();
        for (e, c) in terms {
            let mut t = c.clone();
            for j in 0..d {
                if e[j] > 0 {
                    t *= &pw[j][e[j]];
                }
            }
            acc += t;
        }
        acc
    };
    let bound = |b: &DyadicBox| eval(&terms_p, &b.lo) - eval(&terms_m, &b.hi);
    let root = DyadicBox { lo: vec![0; d], hi: vec![full; d], log2_den: k, depth: 0 };
    let mut evals = 1u64;
    let mut leaves = 0u64;
    let mut deepest = 0u32;
    let rb = bound(&root);
    let mut stack = vec![(root, rb)];
    while let Some((b, v)) = stack.pop() {
        if !v.is_negative() {
            leaves += 1;
            deepest = deepest.max(b.depth);
            continue;
        }
        let axis = (0..d).max_by_key(|&j| (b.hi[j] - b.lo[j], std::cmp::Reverse(j)));
        let Some(axis) = axis.filter(|&j| b.hi[j] - b.lo[j] >= 2 && b.depth < max_depth) else {
            let approx = Rat::new(v, s.scale.clone()).to_f64().unwrap_or(f64::NAN);
            return Ok(AdaptiveOutcome::Inconclusive { evals, witness: b, witness_bound: approx });
        };
        let mid = (b.lo[axis] + b.hi[axis]) / 2;
        let mut left = b.clone();
        left.hi[axis] = mid;
        left.depth += 1;
        let mut right = b;
        right.lo[axis] = mid;
        right.depth += 1;
        let (vl, vr) = (bound(&left), bound(&right));
        evals += 2;
        // Push the smaller bound first so the larger one is explored next.
        if vl <= vr {
            stack.push((left, vl));
            stack.push((right, vr));
        } else {
            stack.push((right, vr));
            stack.push((left, vl));
        }
    }
    Ok(AdaptiveOutcome::Certified { evals, leaves, max_depth: deepest })
}

/// Result of the analytic checks for the two entries that touch zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E9E10Report {
    /// Derived `e10` equals `3p(2μp-1)²` exactly.
    pub e10_is_square_form: bool,
    /// `e10` vanishes at `μp = 1/2` (checked at exact rational points).
    pub e10_zero_on_locus: bool,
    /// `e9` has degree ≤ 1 in `b`.
    pub e9_affine_in_b: bool,
    /// The `b`-coefficient equals `6p²(1-2μp)(2μp+1)` exactly.
    pub e9_bcoef_matches: bool,
    /// Minimum of `e9` at `b = 0`, `μ = s/(2p)` over the dense `(p, s)` grid.
    pub e9a_grid_min: f64,
    /// Minimum of `e9` at `b = 1`, `μ = 1/(2p) + s(1 - 1/(2p))` over the grid.
    pub e9b_grid_min: f64,
    /// Minimum over the `p` grid of the closed-form critical value of `e9b`.
    pub critical_value_grid_min: f64,
    /// `p` attaining that minimum.
    pub critical_value_argmin_p: f64,
    /// `22120.5 - 1576√197`.
    pub critical_value_reference: f64,
    /// Grid points per axis.
    pub grid: usize,
    /// All checks hold.
    pub ok: bool,
}

/// Closed-form minimum over `s` of the `b = 1` restriction of `e9`.
pub fn e9b_critical_value(p: f64) -> f64 {
    let r = (44.0 * p.powi(4) - 400.0 * p.powi(3) + 1105.0 * p * p - 66.0 * p + 1.0).sqrt();
    let poly = 3996.0 * p.powi(5) - 284.0 * p.powi(6) - 19956.0 * p.powi(4) + 37329.0 * p.powi(3) - 3291.0 * p * p
        + 99.0 * p
        - 1.0;
    let lin = 400.0 * p.powi(3) - 44.0 * p.powi(4) - 1105.0 * p * p + 66.0 * p - 1.0;
    (poly + lin * r) / (2.0 * p.powi(4))
}

/// Checks `e10 ≥ 0` symbolically and `e9 ≥ 0` via its reduction to `b ∈ {0, 1}`
/// on a dense `grid × grid` mesh of `p ∈ [1/2, 1]`, `s ∈ [0, 1]`.
pub fn check_e9_e10(grid: usize) -> Result<E9E10Report> {
    use crate::algebra::parse_poly;
    let c = crate::algebra::derive_corpus()?;
    let e10 = &c["e10"];
    let square = parse_poly("3 p (2 mu p - 1)^2")?;
    let e10_is_square_form = *e10 == square;
    let mut e10_zero_on_locus = true;
    for &(pn, pd) in &[(1i64, 2i64), (3, 4), (9, 10), (1, 1)] {
        let p = Rat::new(pn.into(), pd.into());
        let mu = Rat::new(pd.into(), (2 * pn).into());
        let v = e10.eval(&[(Var::P, p), (Var::Mu, mu)])?;
        e10_zero_on_locus &= v.is_zero();
    }
    let e9 = &c["e9"];
    let e9_affine_in_b = e9.degree(Var::B) <= 1;
    let e9_bcoef_matches = c["e9_bcoef"] == parse_poly("6 p^2 (1 - 2 mu p) (2 mu p + 1)")?;
    let grid = grid.max(2);
    let e9a = &c["e9a"];
    let e9b = &c["e9b"];
    let mut amin = f64::INFINITY;
    let mut bmin = f64::INFINITY;
    let mut cmin = f64::INFINITY;
    let mut cmin_p = 0.5;
    for i in 0..grid {
        let p = 0.5 + 0.5 * i as f64 / (grid - 1) as f64;
        let cv = e9b_critical_value(p);
        if cv < cmin {
            cmin = cv;
            cmin_p = p;
        }
        for j in 0..grid {
            let s = j as f64 / (grid - 1) as f64;
            amin = amin.min(e9a.eval_f64(&[(Var::P, p), (Var::W, s)])?);
            bmin = bmin.min(e9b.eval_f64(&[(Var::P, p), (Var::W, s)])?);
        }
    }
    let reference = 22120.5 - 1576.0 * 197f64.sqrt();
    let ok = e10_is_square_form
        && e10_zero_on_locus
        && e9_affine_in_b
        && e9_bcoef_matches
        && amin >= 0.0
        && bmin >= reference - 1e-9
        && cmin >= 0.2858;
    Ok(E9E10Report {
        e10_is_square_form,
        e10_zero_on_locus,
        e9_affine_in_b,
        e9_bcoef_matches,
        e9a_grid_min: amin,
        e9b_grid_min: bmin,
        critical_value_grid_min: cmin,
        critical_value_argmin_p: cmin_p,
        critical_value_reference: reference,
        grid,
        ok,
    })
}

/// Reads the worker budget from `PCONTEST_THREADS` (unset or 0: all cores).
pub fn thread_budget_from_env() -> Option<usize> {
    std::env::var("PCONTEST_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0)
}

/// Runs `f` inside a pool of `threads` workers (the global pool when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Exact minimum of `f` over the `(M+1)^d` grid points `i/M` (not a bound;
/// used to cross-check soundness).
pub fn grid_point_min(f: &Poly, m: u64) -> Result<Rat> {
    let axes = cube_axes(f)?;
    let d = axes.len();
    let mut best: Option<Rat> = None;
    let total = (m + 1).pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut pt = Vec::with_capacity(d);
        for v in &axes {
            pt.push((*v, Rat::new(BigInt::from(rem % (m + 1)), BigInt::from(m))));
            rem /= m + 1;
        }
        let v = f.eval(&pt)?;
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    }
    Ok(best.unwrap_or_else(|| f.constant_term()))
}
