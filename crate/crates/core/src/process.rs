//! The p-contest Markov chain.
//!
//! A configuration holds `N` points; the extreme point (leftmost or rightmost)
//! farther from `p·mean` is removed, and the `N-1` survivors form the *core*.
//! At each step a fresh point `ζ` joins the core and the removal is repeated.
//! Ties between the two extremes are broken by a fair coin drawn from the
//! same random stream as `ζ`, and only when a tie actually occurs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for declaring the two extreme distances equal.
pub const TIE_RTOL: f64 = 1e-12;

/// Default classification threshold `ε_class`.
pub const DEFAULT_EPS_CLASS: f64 = 0.01;

/// The deterministic generator used everywhere: seeded from `seed`, with one
/// independent stream per trajectory (or per Monte Carlo chunk).
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The `N-1` retained points in non-decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SortedCore {
    points: Vec<f64>,
}

impl SortedCore {
    /// Sorts `points` and checks that there are at least two finite values.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Usage(format!(
                "a core needs at least 2 points (N >= 3), got {}",
                points.len()
            )));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Usage("core points must be finite".into()));
        }
        points.sort_by(f64::total_cmp);
        Ok(SortedCore { points })
    }

    /// The points, non-decreasing.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Core size `N - 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false: a core has at least two points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `x_(1)`.
    pub fn min(&self) -> f64 {
        self.points[0]
    }

    /// `x_(N-1)`.
    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// The order statistic `x_(k)`, 1-based.
    pub fn order_stat(&self, k: usize) -> f64 {
        self.points[k - 1]
    }

    /// Arithmetic mean.
    pub fn mean(&self) -> f64 {
        self.points.iter().sum::<f64>() / self.points.len() as f64
    }
}

/// Distribution of the new point `ζ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Dist {
    /// Uniform on `[0, 1]`.
    Uniform,
    /// `U[0,1]`, the atom 0 and the atom 1, each with probability 1/3.
    Mixture,
    /// Piecewise-constant density: `density[i]` on `[edges[i], edges[i+1])`.
    Tabulated {
        /// Bin edges, strictly increasing, inside `[0, 1]`.
        edges: Vec<f64>,
        /// Density value on each bin; must integrate to 1.
        density: Vec<f64>,
    },
}

impl Dist {
    /// Checks the descriptor; tabulated densities must be non-negative and
    /// integrate to 1 within `1e-12`.
    pub fn validate(&self) -> Result<()> {
        if let Dist::Tabulated { edges, density } = self {
            if edges.len() < 2 || density.len() + 1 != edges.len() {
                return Err(Error::Usage(
                    "tabulated density needs k+1 edges for k bins".into(),
                ));
            }
            if edges[0] < 0.0 || edges[edges.len() - 1] > 1.0 || edges.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Usage(
                    "tabulated edges must increase strictly inside [0, 1]".into(),
                ));
            }
            if density.iter().any(|d| !d.is_finite() || *d < 0.0) {
                return Err(Error::Usage("tabulated density must be non-negative".into()));
            }
            let mass: f64 = edges.windows(2).zip(density).map(|(w, d)| (w[1] - w[0]) * d).sum();
            if (mass - 1.0).abs() > 1e-12 {
                return Err(Error::Usage(format!("tabulated density integrates to {mass}, not 1")));
            }
        }
        Ok(())
    }

    /// Parses `uniform`, `mixture` or `tabulated:e0,e1,..;d0,d1,..`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let d = match s {
            "uniform" => Dist::Uniform,
            "mixture" => Dist::Mixture,
            _ => {
                let body = s.strip_prefix("tabulated:").ok_or_else(|| {
                    Error::Usage(format!(
                        "unknown distribution {s:?} (uniform | mixture | tabulated:EDGES;DENSITY)"
                    ))
                })?;
                let (e, d) = body
                    .split_once(';')
                    .ok_or_else(|| Error::Usage("tabulated: expected EDGES;DENSITY".into()))?;
                let list = |t: &str| -> Result<Vec<f64>> {
                    t.split(',')
                        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad number {x:?}"))))
                        .collect()
                };
                Dist::Tabulated { edges: list(e)?, density: list(d)? }
            }
        };
        d.validate()?;
        Ok(d)
    }

    /// Short name used in reports.
    pub fn label(&self) -> String {
        match self {
            Dist::Uniform => "uniform".into(),
            Dist::Mixture => "mixture".into(),
            Dist::Tabulated { edges, density } => format!(
                "tabulated:{};{}",
                edges.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
                density.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Dist::Uniform => rng.random::<f64>(),
            Dist::Mixture => match rng.random_range(0..3u8) {
                0 => rng.random::<f64>(),
                1 => 0.0,
                _ => 1.0,
            },
            Dist::Tabulated { edges, density } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let last = density.len() - 1;
                for (i, d) in density.iter().enumerate() {
                    let mass = d * (edges[i + 1] - edges[i]);
                    if u < acc + mass || i == last {
                        let v: f64 = rng.random();
                        return edges[i] + v * (edges[i + 1] - edges[i]);
                    }
                    acc += mass;
                }
                unreachable!("density has at least one bin")
            }
        }
    }

    /// Whether `x` lies in the closed support.
    pub fn in_support(&self, x: f64) -> bool {
        match self {
            Dist::Uniform | Dist::Mixture => (0.0..=1.0).contains(&x),
            Dist::Tabulated { edges, density } => edges
                .windows(2)
                .zip(density)
                .any(|(w, d)| *d > 0.0 && x >= w[0] && x <= w[1]),
        }
    }

    /// Whether the distribution puts positive mass exactly at 0.
    pub fn has_atom_at_zero(&self) -> bool {
        matches!(self, Dist::Mixture)
    }
}

/// Bounded (`ζ` from the distribution) or borderless (`ζ ~ U[0, 6·x_(N-1)]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// New points drawn from [`Dist`].
    Bounded,
    /// New points uniform on `[0, 6·x_(N-1)]`.
    Borderless,
}

impl Mode {
    /// Parses `bounded` or `borderless`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "bounded" => Ok(Mode::Bounded),
            "borderless" => Ok(Mode::Borderless),
            other => Err(Error::Usage(format!("unknown mode {other:?} (bounded | borderless)"))),
        }
    }
}

/// Parameters of the chain. The tie rule is always the fair coin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams {
    /// Configuration size `N ≥ 3`.
    pub n: usize,
    /// Contest multiplier `p > 0`.
    pub p: f64,
    /// Replacement distribution (ignored in borderless mode).
    pub dist: Dist,
    /// Bounded or borderless dynamics.
    pub mode: Mode,
}

impl ProcessParams {
    /// Validated constructor.
    pub fn new(n: usize, p: f64, dist: Dist, mode: Mode) -> Result<Self> {
        if n < 3 {
            return Err(Error::Usage(format!("N = {n} must be at least 3")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Usage(format!("p = {p} must be positive")));
        }
        dist.validate()?;
        Ok(ProcessParams { n, p, dist, mode })
    }
}

/// `p` times the arithmetic mean.
pub fn p_centre(points: &[f64], p: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Usage("p-centre of an empty configuration".into()));
    }
    Ok(p * points.iter().sum::<f64>() / points.len() as f64)
}

/// Which end of the configuration was removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The minimum.
    Left,
    /// The maximum.
    Right,
}

/// Result of one removal.
#[derive(Debug, Clone, PartialEq)]
pub struct Removal {
    /// The `N-1` survivors.
    pub survivors: SortedCore,
    /// The removed end.
    pub side: Side,
    /// The removed value.
    pub value: f64,
    /// Whether the distances tied and the coin decided.
    pub tie: bool,
}

/// Removes the extreme farther from `p·mean`. On a tie
/// (`|d_L - d_R| ≤ 1e-12·max(1, p·mean)`) `coin` is called once and `true`
/// removes the left end. `config` may be in any order.
pub fn remove_extreme(config: &[f64], p: f64, coin: impl FnOnce() -> bool) -> Result<Removal> {
    if config.len() < 3 {
        return Err(Error::Usage(format!(
            "removal needs N >= 3 points, got {}",
            config.len()
        )));
    }
    let mut pts = config.to_vec();
    pts.sort_by(f64::total_cmp);
    let c = p_centre(&pts, p)?;
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    let (dl, dr) = ((lo - c).abs(), (hi - c).abs());
    let tie = (dl - dr).abs() <= TIE_RTOL * c.abs().max(1.0);
    let side = if tie {
        if coin() {
            Side::Left
        } else {
            Side::Right
        }
    } else if dl > dr {
        Side::Left
    } else {
        Side::Right
    };
    let value = match side {
        Side::Left => pts.remove(0),
        Side::Right => pts.pop().expect("non-empty"),
    };
    Ok(Removal { survivors: SortedCore { points: pts }, side, value, tie })
}

/// Tag of the removed point relative to the pre-step core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovedTag {
    /// The old minimum `x_(1)`.
    LeftOld,
    /// The old maximum `x_(N-1)`.
    RightOld,
    /// The freshly sampled point.
    New,
}

/// One transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepEvent {
    /// Step index (1-based: the step producing the core at time `t`).
    pub t: u64,
    /// The new point `ζ`.
    pub sampled: f64,
    /// Which point left; equal values are reported as the new point.
    pub removed_tag: RemovedTag,
    /// The removed value.
    pub removed_value: f64,
    /// Whether the coin was used.
    pub tie: bool,
}

/// One step: draw `ζ`, add it to the core, remove the extreme.
pub fn step<R: Rng + ?Sized>(
    core: &SortedCore,
    params: &ProcessParams,
    rng: &mut R,
    t: u64,
) -> Result<(SortedCore, StepEvent)> {
    let sampled = match params.mode {
        Mode::Bounded => params.dist.sample(rng),
        Mode::Borderless => {
            let r = 6.0 * core.max();
            if r <= 0.0 {
                return Err(Error::Halted("borderless core has x_(N-1) = 0".into()));
            }
            r * rng.random::<f64>()
        }
    };
    let mut config = core.points.clone();
    config.push(sampled);
    let removal = remove_extreme(&config, params.p, || rng.random::<bool>())?;
    let removed_tag = if removal.value == sampled {
        RemovedTag::New
    } else {
        match removal.side {
            Side::Left => RemovedTag::LeftOld,
            Side::Right => RemovedTag::RightOld,
        }
    };
    let ev = StepEvent { t, sampled, removed_tag, removed_value: removal.value, tie: removal.tie };
    Ok((removal.survivors, ev))
}

/// Terminal classification of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    /// `x_(N-1)(T) < ε_class`.
    Near0,
    /// `x_(1)(T) > 1 - ε_class`.
    Near1,
    /// Neither.
    Undecided,
}

impl Class {
    /// Classifies a core at threshold `eps`.
    pub fn of(core: &SortedCore, eps: f64) -> Class {
        if core.max() < eps {
            Class::Near0
        } else if core.min() > 1.0 - eps {
            Class::Near1
        } else {
            Class::Undecided
        }
    }

    /// Report label.
    pub fn label(self) -> &'static str {
        match self {
            Class::Near0 => "near-0",
            Class::Near1 => "near-1",
            Class::Undecided => "undecided",
        }
    }
}

/// Starting configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// A given core (must lie in the support in bounded mode).
    Core(SortedCore),
    /// `N-1` draws from the distribution (uniform in borderless mode),
    /// taken from the trajectory's own stream before the first step.
    Sampled,
}

/// Simulation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Number of steps `T ≥ 1`.
    pub horizon: u64,
    /// Master seed.
    pub seed: u64,
    /// Step indices at which the core is snapshotted (those `> T` are ignored).
    pub checkpoints: Vec<u64>,
    /// Classification threshold.
    pub eps_class: f64,
    /// Record the [`StepEvent`] of each checkpoint step.
    pub log_events: bool,
}

impl SimOptions {
    /// Defaults: no checkpoints, `ε_class = 0.01`, no event log.
    pub fn new(horizon: u64, seed: u64) -> Self {
        SimOptions { horizon, seed, checkpoints: Vec::new(), eps_class: DEFAULT_EPS_CLASS, log_events: false }
    }
}

/// Snapshot at a checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    /// Step index.
    pub t: u64,
    /// Core after step `t`.
    pub core: SortedCore,
    /// `min_{s ≤ t} x_(N-1)(s)`.
    pub running_min: f64,
}

/// A logged checkpoint event together with the resulting core.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    /// The transition.
    #[serde(flatten)]
    pub event: StepEvent,
    /// Core after the transition.
    pub core: SortedCore,
}

/// Everything recorded about one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    /// Parameters.
    pub params: ProcessParams,
    /// Horizon `T`.
    pub horizon: u64,
    /// Master seed.
    pub seed: u64,
    /// Stream index (run number).
    pub stream: u64,
    /// Initial core.
    pub initial: SortedCore,
    /// Snapshots.
    pub checkpoints: Vec<Checkpoint>,
    /// `min_{t ≤ T} x_(N-1)(t)` (including the initial core).
    pub running_min: f64,
    /// Core at time `T`.
    pub final_core: SortedCore,
    /// Classification threshold used.
    pub eps_class: f64,
    /// Classification of the final core.
    pub class: Class,
    /// Steps actually taken (smaller than `T` when absorbed or halted).
    pub steps_taken: u64,
    /// The frozen all-zero core was reached and the run was short-circuited.
    pub absorbed: bool,
    /// The borderless chain halted at `x_(N-1) = 0`.
    pub halted: bool,
    /// Checkpoint events when requested.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventRecord>,
}

/// Whether the core can never move again: bounded mode, `p < N/2`, all
/// points at 0. Any `ζ > 0` is then farther from `p·mean = pζ/N` than 0,
/// and `ζ = 0` changes nothing.
pub fn is_frozen_at_zero(core: &SortedCore, params: &ProcessParams) -> bool {
    params.mode == Mode::Bounded && core.max() == 0.0 && params.p < params.n as f64 / 2.0
}

/// Runs one trajectory on stream `stream`; deterministic in all inputs.
pub fn simulate(params: &ProcessParams, init: &Init, opts: &SimOptions, stream: u64) -> Result<TrajectorySummary> {
    if opts.horizon == 0 {
        return Err(Error::Usage("horizon must be at least 1".into()));
    }
    if !(opts.eps_class > 0.0 && opts.eps_class < 1.0) {
        return Err(Error::Usage(format!("eps_class = {} outside (0, 1)", opts.eps_class)));
    }
    let mut rng = rng_for(opts.seed, stream);
    let initial = match init {
        Init::Core(c) => {
            if c.len() != params.n - 1 {
                return Err(Error::Usage(format!(
                    "initial core has {} points, N-1 = {}",
                    c.len(),
                    params.n - 1
                )));
            }
            let ok = match params.mode {
                Mode::Bounded => c.points().iter().all(|&x| params.dist.in_support(x)),
                Mode::Borderless => c.min() >= 0.0,
            };
            if !ok {
                return Err(Error::Usage("initial core lies outside the support".into()));
            }
            c.clone()
        }
        Init::Sampled => {
            let pts = (0..params.n - 1)
                .map(|_| match params.mode {
                    Mode::Bounded => params.dist.sample(&mut rng),
                    Mode::Borderless => rng.random::<f64>(),
                })
                .collect();
            SortedCore::new(pts)?
        }
    };
    let mut cps: Vec<u64> = opts.checkpoints.iter().copied().filter(|&t| t >= 1 && t <= opts.horizon).collect();
    cps.sort_unstable();
    cps.dedup();
    let mut next_cp = cps.iter().peekable();
    let mut checkpoints = Vec::with_capacity(cps.len());
    let mut events = Vec::new();
    let mut core = initial.clone();
    let mut running_min = core.max();
    let mut steps_taken = 0;
    let mut absorbed = false;
    let mut halted = false;
    for t in 1..=opts.horizon {
        if is_frozen_at_zero(&core, params) {
            absorbed = true;
            break;
        }
        let (next, ev) = match step(&core, params, &mut rng, t) {
            Ok(x) => x,
            Err(Error::Halted(_)) => {
                halted = true;
                break;
            }
            Err(e) => return Err(e),
        };
        core = next;
        steps_taken = t;
        running_min = running_min.min(core.max());
        if next_cp.peek() == Some(&&t) {
            next_cp.next();
            checkpoints.push(Checkpoint { t, core: core.clone(), running_min });
            if opts.log_events {
                events.push(EventRecord { event: ev, core: core.clone() });
            }
        }
    }
    // A stopped chain stays where it is: remaining checkpoints repeat the final core.
    for &t in next_cp {
        checkpoints.push(Checkpoint { t, core: core.clone(), running_min });
    }
    let class = if absorbed { Class::Near0 } else { Class::of(&core, opts.eps_class) };
    Ok(TrajectorySummary {
        params: params.clone(),
        horizon: opts.horizon,
        seed: opts.seed,
        stream,
        initial,
        checkpoints,
        running_min,
        final_core: core,
        eps_class: opts.eps_class,
        class,
        steps_taken,
        absorbed,
        halted,
        events,
    })
}

/// `runs` trajectories on streams `0..runs`, in parallel, returned in stream order.
pub fn simulate_runs(params: &ProcessParams, init: &Init, opts: &SimOptions, runs: u64) -> Result<Vec<TrajectorySummary>> {
    (0..runs).into_par_iter().map(|s| simulate(params, init, opts, s)).collect()
}

/// Integers `k ∈ [1, N-1]` with `N - N/(2p) - 1 < k < N - N/(2p) + 1`.
/// The window is open; endpoints within `1e-12` count as outside.
pub fn ruling_k(n: usize, p: f64) -> Result<Vec<usize>> {
    if n < 3 {
        return Err(Error::Usage(format!("N = {n} must be at least 3")));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p = {p} must be positive")));
    }
    let nf = n as f64;
    if p >= nf / 2.0 {
        return Err(Error::Domain(format!(
            "p = {p} >= N/2: the leftmost point is always removed, no ruling order statistic"
        )));
    }
    let c = nf - nf / (2.0 * p);
    let tol = 1e-12 * c.abs().max(1.0);
    Ok((1..n).filter(|&k| (k as f64 - c).abs() < 1.0 - tol).collect())
}

/// Explicit constants for the drift argument around the ruling `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimBounds {
    /// `δ > 0` with `a[2p(N-k)(1-Δ) - (N-2p)] - (N-2p)δ > 0`.
    pub delta: f64,
    /// `Δ ∈ (0, 1)` paired with `delta`.
    pub big_delta: f64,
    /// `δ₃ > 0` with `2pNδ₃ < [N - 2p(N-k-1)]a`.
    pub delta3: f64,
}

/// Positive `(δ, Δ, δ₃)` for the ruling-`k` drift inequalities.
///
/// With `m₀ = a[2p(N-k) - (N-2p)]`, the margin
/// `a[2p(N-k)(1-Δ) - (N-2p)] - (N-2p)δ` is zero at `δ = m₀/(N-2p)`, `Δ = 0`
/// and at `δ = 0`, `Δ = 1 - (N-2p)/(2p(N-k))`. Halving both saturating values
/// still leaves margin exactly 0 (the margin is linear in `(δ, Δ)`), so each is
/// quartered, leaving margin `m₀/2`. `δ₃` is half the value that saturates its
/// inequality.
pub fn claim_bounds(n: usize, k: usize, p: f64, a: f64) -> Result<ClaimBounds> {
    if n < 3 || k < 1 || k >= n {
        return Err(Error::Domain(format!("need N >= 3 and 1 <= k <= N-1 (N = {n}, k = {k})")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("a = {a} outside (0, 1]")));
    }
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p = {p} must be positive")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let gap = nf - 2.0 * p;
    if gap <= 0.0 {
        return Err(Error::Domain(format!("p = {p} >= N/2")));
    }
    let lead = 2.0 * p * (nf - kf);
    if lead <= gap {
        return Err(Error::Domain(format!(
            "k = {k} violates k < N - N/(2p) + 1 (2p(N-k) = {lead} <= N-2p = {gap})"
        )));
    }
    let right = nf - 2.0 * p * (nf - kf - 1.0);
    if right <= 0.0 {
        return Err(Error::Domain(format!(
            "k = {k} violates k > N - N/(2p) - 1 (N - 2p(N-k-1) = {right})"
        )));
    }
    let m0 = a * (lead - gap);
    Ok(ClaimBounds {
        delta: m0 / gap / 4.0,
        big_delta: (1.0 - gap / lead) / 4.0,
        delta3: right * a / (4.0 * p * nf),
    })
}

/// The margin `a[2p(N-k)(1-Δ) - (N-2p)] - (N-2p)δ` (positive when the bound holds).
pub fn claim_margin(n: usize, k: usize, p: f64, a: f64, delta: f64, big_delta: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    a * (2.0 * p * (nf - kf) * (1.0 - big_delta) - (nf - 2.0 * p)) - (nf - 2.0 * p) * delta
}
