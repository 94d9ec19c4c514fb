//! Named Monte Carlo suites for the long-run behaviour of the chain.
//!
//! * `thm1` — `N=4`, `p=0.9`, uniform: the core collapses to 0.
//! * `thm3` — `N=3`, `p=1.2`, uniform: the core converges to 1.
//! * `thm2-mixture` — `N=3`, `p=1.2`, the three-atom mixture, initial points
//!   drawn from it: both limits occur with positive probability.
//! * `prop1a` — `N=5`, `p=0.7`, uniform: the running minimum of `x_(N-1)`
//!   keeps decreasing.
//!
//! The suite names are fixed identifiers of the command-line contract.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::{simulate_runs, Class, Dist, Init, Mode, ProcessParams, SimOptions, SortedCore, TrajectorySummary};

/// Classification thresholds reported for sensitivity.
pub const EPS_SENSITIVITY: [f64; 3] = [0.05, 0.01, 0.001];

/// Names of the available suites.
pub const SUITES: [&str; 4] = ["thm1", "thm2-mixture", "thm3", "prop1a"];

/// Overridable suite settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    /// Suite identifier.
    pub name: String,
    /// Configuration size.
    pub n: usize,
    /// Contest multiplier.
    pub p: f64,
    /// Replacement distribution.
    pub dist: Dist,
    /// Steps per run.
    pub horizon: u64,
    /// Number of runs.
    pub runs: u64,
    /// Master seed.
    pub seed: u64,
    /// Classification threshold.
    pub eps_class: f64,
}

/// Defaults for a named suite.
pub fn suite_defaults(name: &str) -> Result<SuiteConfig> {
    let (n, p, dist, runs) = match name {
        "thm1" => (4, 0.9, Dist::Uniform, 200),
        "thm3" => (3, 1.2, Dist::Uniform, 200),
        "thm2-mixture" => (3, 1.2, Dist::Mixture, 1000),
        "prop1a" => (5, 0.7, Dist::Uniform, 200),
        other => {
            return Err(Error::Usage(format!(
                "unknown suite {other:?} (one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteConfig {
        name: name.to_string(),
        n,
        p,
        dist,
        horizon: 100_000,
        runs,
        seed: 1,
        eps_class: crate::process::DEFAULT_EPS_CLASS,
    })
}

/// Class fractions at one threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sensitivity {
    /// Threshold.
    pub eps_class: f64,
    /// Fraction with `x_(N-1)(T) < ε`.
    pub near0: f64,
    /// Fraction with `x_(1)(T) > 1 - ε`.
    pub near1: f64,
    /// Remaining fraction.
    pub undecided: f64,
}

/// Summary and verdict of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    /// Settings used.
    pub config: SuiteConfig,
    /// Human-readable pass criterion.
    pub criterion: String,
    /// The statistic compared against the criterion.
    pub statistic: f64,
    /// The bound it is compared with.
    pub threshold: f64,
    /// Whether the criterion holds.
    pub pass: bool,
    /// Class fractions at the sensitivity thresholds.
    pub sensitivity: Vec<Sensitivity>,
    /// Runs short-circuited at the frozen all-zero core.
    pub absorbed_runs: u64,
    /// Checkpoint times of the running-minimum medians.
    pub checkpoint_times: Vec<u64>,
    /// Median over runs of `min_{s ≤ t} x_(N-1)(s)` at each checkpoint.
    pub median_running_min: Vec<f64>,
}

fn class_fractions(runs: &[TrajectorySummary], eps: f64) -> Sensitivity {
    let n = runs.len() as f64;
    let (mut z, mut o) = (0usize, 0usize);
    for r in runs {
        let c = if r.absorbed { Class::Near0 } else { Class::of(&r.final_core, eps) };
        match c {
            Class::Near0 => z += 1,
            Class::Near1 => o += 1,
            Class::Undecided => {}
        }
    }
    Sensitivity { eps_class: eps, near0: z as f64 / n, near1: o as f64 / n, undecided: (runs.len() - z - o) as f64 / n }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Simulates the suite and evaluates its criterion.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let params = ProcessParams::new(cfg.n, cfg.p, cfg.dist.clone(), Mode::Bounded)?;
    let mut cps: Vec<u64> = [1_000u64, 10_000, 100_000].iter().copied().filter(|&t| t <= cfg.horizon).collect();
    if cps.last() != Some(&cfg.horizon) {
        cps.push(cfg.horizon);
    }
    let opts = SimOptions {
        horizon: cfg.horizon,
        seed: cfg.seed,
        checkpoints: cps.clone(),
        eps_class: cfg.eps_class,
        log_events: false,
    };
    let runs = simulate_runs(&params, &Init::Sampled, &opts, cfg.runs)?;
    let nf = runs.len() as f64;
    let frac = |pred: &dyn Fn(&SortedCore) -> bool| runs.iter().filter(|r| pred(&r.final_core)).count() as f64 / nf;
    let median_running_min: Vec<f64> = (0..cps.len())
        .map(|i| median(runs.iter().map(|r| r.checkpoints[i].running_min).collect()))
        .collect();
    let (criterion, statistic, threshold, pass) = match cfg.name.as_str() {
        "thm1" => {
            let s = frac(&|c| c.max() < 0.1);
            ("fraction of runs with x_(N-1)(T) < 0.1 is at least 0.95".to_string(), s, 0.95, s >= 0.95)
        }
        "thm3" => {
            let s = frac(&|c| c.min() > 0.9);
            ("fraction of runs with x_(1)(T) > 0.9 is at least 0.95".to_string(), s, 0.95, s >= 0.95)
        }
        "thm2-mixture" => {
            let f = class_fractions(&runs, cfg.eps_class);
            let q = 1.0 / 27.0;
            let lower = q - 3.0 * (q * (1.0 - q) / nf).sqrt();
            (
                format!("near-0 fraction >= 1/27 - 3 sigma = {lower:.5} and near-1 fraction > 0 (near-1 = {:.4})", f.near1),
                f.near0,
                lower,
                f.near0 >= lower && f.near1 > 0.0,
            )
        }
        "prop1a" => {
            let dec = median_running_min.windows(2).all(|w| w[1] < w[0]);
            let last = *median_running_min.last().unwrap_or(&f64::NAN);
            (
                "median running min of x_(N-1) strictly decreasing over t = 1e3, 1e4, 1e5".to_string(),
                last,
                median_running_min.first().copied().unwrap_or(f64::NAN),
                dec && median_running_min.len() >= 2,
            )
        }
        other => return Err(Error::Usage(format!("unknown suite {other:?}"))),
    };
    Ok(SuiteReport {
        config: cfg.clone(),
        criterion,
        statistic,
        threshold,
        pass,
        sensitivity: EPS_SENSITIVITY.iter().map(|&e| class_fractions(&runs, e)).collect(),
        absorbed_runs: runs.iter().filter(|r| r.absorbed).count() as u64,
        checkpoint_times: cps,
        median_running_min,
    })
}
