//! `pcontest` command-line front end.
//!
//! Exit status: 0 on success, 1 when a check or certification fails, 2 on
//! usage, domain or parse errors. `PCONTEST_THREADS` (or `--threads`) sets
//! the worker budget; outputs do not depend on it.

mod config;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

use pcontest::cases::{drift_closed_form, NormalizedCore};
use pcontest::certifier::{self, AdaptiveOutcome, Verdict};
use pcontest::experiments::{run_suite, suite_defaults};
use pcontest::lyapunov::{self, DriftVerdict, HChoice, Region};
use pcontest::process::{self, Dist, Init, Mode, ProcessParams, SimOptions, SortedCore};
use pcontest::{algebra, report, Error, Result};

#[derive(Parser)]
#[command(name = "pcontest", version, about = "Simulate and analyse the p-contest process")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate trajectories and write one classified CSV row per run.
    Simulate(SimulateArgs),
    /// Monte Carlo estimate of the one-step drift of a Lyapunov function.
    Drift(DriftArgs),
    /// Box-method lower bound or adaptive positivity proof for a polynomial.
    Certify(CertifyArgs),
    /// Case analysis and closed-form drift integrals of a normalized core.
    CaseTable(CaseTableArgs),
    /// The N=3 kernel Λ(a, b) at a point, or a CSV scan of it.
    Lambda(LambdaArgs),
    /// Ruling order statistics k for (N, p), with the drift constants.
    RulingK(RulingKArgs),
    /// Derive the drift-numerator corpus and compare it with the transcription.
    Corpus(CorpusArgs),
    /// Run a named Monte Carlo suite (thm1, thm2-mixture, thm3, prop1a).
    Suite(SuiteArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        /// Manifest file.
        manifest: PathBuf,
    },
}

/// Flags shared by every subcommand.
#[derive(Args, Serialize, Clone)]
struct Common {
    /// key=value config file; command-line flags override its values.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Worker threads (default: PCONTEST_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// Configuration size N.
    #[arg(long)]
    n: usize,
    /// Contest multiplier p.
    #[arg(long)]
    p: f64,
    /// uniform | mixture | tabulated:e0,e1,..;d0,d1,..
    #[arg(long, default_value = "uniform")]
    dist: String,
    /// bounded | borderless.
    #[arg(long, default_value = "bounded")]
    mode: String,
    /// Horizon T.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    /// Number of runs (stream indices 0..runs).
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial core as comma-separated points (default: drawn per run).
    #[arg(long)]
    init: Option<String>,
    /// Comma-separated checkpoint steps.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Classification threshold.
    #[arg(long, default_value_t = process::DEFAULT_EPS_CLASS)]
    eps_class: f64,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSONL log of the checkpoint events.
    #[arg(long)]
    events: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct DriftArgs {
    /// Configuration size N.
    #[arg(long)]
    n: usize,
    /// Contest multiplier p.
    #[arg(long)]
    p: f64,
    /// general (borderless chain) | pair (N = 3).
    #[arg(long, default_value = "general")]
    h: String,
    /// Keep only states with x_(N-1) at most this value.
    #[arg(long)]
    region_max: Option<f64>,
    /// Conditioned steps.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// State draws allowed in total (default: 1000 × samples).
    #[arg(long)]
    max_attempts: Option<u64>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct CertifyArgs {
    /// Table polynomial e1..e8 on the unit cube.
    #[arg(long, conflicts_with = "corpus")]
    poly: Option<String>,
    /// Corpus file (`name: polynomial` per line) with variables in [0, 1].
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Entry of the corpus file (default: the only entry).
    #[arg(long, requires = "corpus")]
    entry: Option<String>,
    /// Grid resolution M (default: the table value for e1..e8).
    #[arg(long)]
    grid: Option<u64>,
    /// Strict threshold the bound must exceed (default: the table value;
    /// without one the bound must be non-negative).
    #[arg(long)]
    threshold: Option<i64>,
    /// uniform | adaptive.
    #[arg(long, default_value = "uniform")]
    mode: String,
    /// Maximum subdivision depth of the adaptive mode.
    #[arg(long, default_value_t = 40)]
    depth: u32,
    /// Chunks of the first axis.
    #[arg(long, default_value_t = 64)]
    chunks: usize,
    /// Refuse grids with more cells than this.
    #[arg(long, default_value_t = certifier::DEFAULT_CELL_BUDGET)]
    cell_budget: u64,
    /// Certificate JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct CaseTableArgs {
    /// Core minimum a (the maximum is 1).
    #[arg(long)]
    a: f64,
    /// Core mean μ.
    #[arg(long)]
    mu: f64,
    /// Core size M = N - 1.
    #[arg(long)]
    m: u32,
    /// Contest multiplier p.
    #[arg(long)]
    p: f64,
    /// text | json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct LambdaArgs {
    /// Smaller point a.
    #[arg(long, required_unless_present = "scan")]
    a: Option<f64>,
    /// Larger point b.
    #[arg(long, required_unless_present = "scan")]
    b: Option<f64>,
    /// Emit a CSV scan on a k × k triangular grid.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    scan: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct RulingKArgs {
    /// Configuration size N.
    #[arg(long)]
    n: usize,
    /// Contest multiplier p.
    #[arg(long)]
    p: f64,
    /// Also print (δ, Δ, δ₃) for this lower level a.
    #[arg(long)]
    a: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct CorpusArgs {
    /// Write the derived corpus here.
    #[arg(long)]
    derive_out: Option<PathBuf>,
    /// Random rational points per comparison.
    #[arg(long, default_value_t = 1000)]
    points: usize,
    /// Seed of the comparison points.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Grid size of the e9/e10 checks.
    #[arg(long, default_value_t = 400)]
    e9_grid: usize,
    /// JSON report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

#[derive(Args, Serialize)]
struct SuiteArgs {
    /// thm1 | thm2-mixture | thm3 | prop1a.
    #[arg(long)]
    name: String,
    /// Override N.
    #[arg(long)]
    n: Option<usize>,
    /// Override p.
    #[arg(long)]
    p: Option<f64>,
    /// Override the distribution.
    #[arg(long)]
    dist: Option<String>,
    /// Override the horizon.
    #[arg(long)]
    steps: Option<u64>,
    /// Override the number of runs.
    #[arg(long)]
    runs: Option<u64>,
    /// Override the seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the classification threshold.
    #[arg(long)]
    eps_class: Option<f64>,
    /// JSON report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    common: Common,
}

/// Result of a subcommand: success, or a failed check (exit 1).
enum Outcome {
    Ok,
    CheckFailed(String),
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

fn json(v: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| Error::Usage(format!("bad {what} entry {x:?}"))))
        .collect()
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let params = ProcessParams::new(a.n, a.p, Dist::parse(&a.dist)?, Mode::parse(&a.mode)?)?;
    let init = match &a.init {
        Some(s) => Init::Core(SortedCore::new(parse_list(s, "init")?)?),
        None => Init::Sampled,
    };
    let mut opts = SimOptions::new(a.steps, a.seed);
    opts.eps_class = a.eps_class;
    if let Some(c) = &a.checkpoints {
        opts.checkpoints = parse_list(c, "checkpoint")?;
    }
    opts.log_events = a.events.is_some();
    let runs = process::simulate_runs(&params, &init, &opts, a.runs)?;
    write_output(a.out.as_deref(), &report::summary_csv(&runs)?)?;
    if let Some(e) = &a.events {
        std::fs::write(e, report::events_jsonl(&runs)?)?;
    }
    Ok(Outcome::Ok)
}

fn drift(a: &DriftArgs) -> Result<Outcome> {
    let h = HChoice::parse(&a.h)?;
    let mode = match h {
        HChoice::General => Mode::Borderless,
        HChoice::Pair => Mode::Bounded,
    };
    let params = ProcessParams::new(a.n, a.p, Dist::Uniform, mode)?;
    let region = a.region_max.map_or(Region::All, Region::MaxAtMost);
    let max_attempts = a.max_attempts.unwrap_or(a.samples.saturating_mul(1000));
    let r = lyapunov::empirical_drift(&params, h, region, a.samples, max_attempts, a.seed)?;
    write_output(a.out.as_deref(), &json(&r)?)?;
    Ok(match r.verdict {
        DriftVerdict::ConsistentWithSupermartingale => Outcome::Ok,
        DriftVerdict::Violated => Outcome::CheckFailed(format!("mean {} > {} · stderr {}", r.mean, lyapunov::Z99, r.stderr)),
        DriftVerdict::Inconclusive => {
            Outcome::CheckFailed(format!("only {} of {} samples hit the region", r.samples, a.samples))
        }
    })
}

/// Certificate of an adaptive run.
#[derive(Serialize)]
struct AdaptiveCertificate {
    poly: String,
    vars: Vec<String>,
    mode: &'static str,
    depth: u32,
    outcome: AdaptiveOutcome,
    wall_time_s: f64,
}

fn certify(a: &CertifyArgs) -> Result<Outcome> {
    let (name, f, table) = match (&a.poly, &a.corpus) {
        (Some(p), None) => {
            let f = certifier::box_polynomials()?
                .into_iter()
                .find(|(n, _)| n == p)
                .ok_or_else(|| Error::Usage(format!("unknown polynomial {p:?} (e1..e8)")))?
                .1;
            (p.clone(), f, certifier::table_entry(p))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("corpus file {}: {e}", path.display())))?;
            let corpus = algebra::read_corpus(&text)?;
            let (n, f) = match &a.entry {
                Some(e) => corpus
                    .get_key_value(e)
                    .ok_or_else(|| Error::Usage(format!("no entry {e:?} in {}", path.display())))?,
                None if corpus.len() == 1 => corpus.iter().next().expect("one entry"),
                None => return Err(Error::Usage("the corpus has several entries; pass --entry".into())),
            };
            (n.clone(), f.clone(), None)
        }
        _ => return Err(Error::Usage("pass exactly one of --poly or --corpus".into())),
    };
    let threshold = a.threshold.or(table.map(|t| t.1));
    match a.mode.as_str() {
        "uniform" => {
            let m = a
                .grid
                .or(table.map(|t| t.0))
                .ok_or_else(|| Error::Usage("--grid is required for polynomials outside the table".into()))?;
            if m == 0 {
                return Err(Error::Usage("--grid must be positive".into()));
            }
            let c = certifier::certify_uniform(&name, &f, m, threshold, a.chunks, a.cell_budget)?;
            write_output(a.out.as_deref(), &json(&c)?)?;
            Ok(match c.verdict {
                Verdict::CertifiedPositive => Outcome::Ok,
                Verdict::Failed => Outcome::CheckFailed(format!(
                    "{name}: bound {} does not exceed {}",
                    c.bound_approx,
                    threshold.map_or("0 (non-negative)".to_string(), |t| t.to_string())
                )),
            })
        }
        "adaptive" => {
            let t0 = Instant::now();
            let outcome = certifier::adaptive_certify(&f, a.depth)?;
            let failed = matches!(outcome, AdaptiveOutcome::Inconclusive { .. });
            let cert = AdaptiveCertificate {
                poly: name.clone(),
                vars: f.vars().iter().map(|v| v.name().to_string()).collect(),
                mode: "adaptive",
                depth: a.depth,
                outcome,
                wall_time_s: t0.elapsed().as_secs_f64(),
            };
            write_output(a.out.as_deref(), &json(&cert)?)?;
            Ok(if failed {
                Outcome::CheckFailed(format!("{name}: positivity not established at depth {}", a.depth))
            } else {
                Outcome::Ok
            })
        }
        other => Err(Error::Usage(format!("unknown mode {other:?} (uniform | adaptive)"))),
    }
}

#[derive(Serialize)]
struct CaseTable {
    core: NormalizedCore,
    p: f64,
    report: pcontest::cases::CaseReport,
    a: [f64; 5],
    i: [f64; 5],
    active: f64,
}

fn case_table(a: &CaseTableArgs) -> Result<Outcome> {
    let core = NormalizedCore::new(a.a, a.mu, a.m)?;
    let d = drift_closed_form(&core, a.p)?;
    let t = CaseTable { core, p: a.p, active: d.active(), report: d.report, a: d.a, i: d.i };
    let text = match a.format.as_str() {
        "json" => json(&t)?,
        "text" => {
            let r = &t.report;
            let mut s = String::new();
            let mut line = |k: &str, v: String| s.push_str(&format!("{k:<12} {v}\n"));
            line("a", format!("{}", t.core.a));
            line("mu", format!("{}", t.core.mu));
            line("M", format!("{}", t.core.m));
            line("p", format!("{}", t.p));
            line("p1 p2 p3", format!("{:.12} {:.12} {:.12}", r.p1, r.p2, r.p3));
            line("X1 X2 X3", format!("{:.12} {:.12} {:.12}", r.x1, r.x2, r.x3));
            line("t_z1", format!("{:.12}", r.t_z1));
            line("t_a1", format!("{:.12}", r.t_a1));
            line("t_za", format!("{:.12}", r.t_za));
            line("case", format!("{:?}", r.case));
            line("boundary", format!("{}", r.boundary));
            line("candidates", format!("{:?}", r.candidates));
            for j in 0..5 {
                line(&format!("A{}", j + 1), format!("{:.12e}", t.a[j]));
            }
            line("active I", format!("{:.12e}", t.active));
            s
        }
        other => return Err(Error::Usage(format!("unknown format {other:?} (text | json)"))),
    };
    write_output(a.out.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct LambdaPoint {
    a: f64,
    b: f64,
    branch: u8,
    lambda_closed: f64,
    lambda_quad: f64,
}

fn lambda(a: &LambdaArgs) -> Result<Outcome> {
    let text = match (a.scan, a.a, a.b) {
        (Some(k), _, _) => report::lambda_scan_csv(k)?,
        (None, Some(x), Some(y)) => json(&LambdaPoint {
            a: x,
            b: y,
            branch: lyapunov::lambda_branch(x, y),
            lambda_closed: lyapunov::lambda_closed(x, y)?,
            lambda_quad: lyapunov::lambda_quadrature(x, y)?,
        })?,
        _ => return Err(Error::Usage("pass --a and --b, or --scan K".into())),
    };
    write_output(a.out.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn ruling_k(a: &RulingKArgs) -> Result<Outcome> {
    let ks = process::ruling_k(a.n, a.p)?;
    let set: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
    let mut s = format!("{{{}}}\n", set.join(", "));
    if let Some(lvl) = a.a {
        for &k in &ks {
            match process::claim_bounds(a.n, k, a.p, lvl) {
                Ok(c) => s.push_str(&format!("k={k} delta={} Delta={} delta3={}\n", c.delta, c.big_delta, c.delta3)),
                Err(e) => s.push_str(&format!("k={k} {e}\n")),
            }
        }
    }
    write_output(None, &s)?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct CorpusReport {
    comparisons: Vec<algebra::CorpusComparison>,
    mismatches: Vec<String>,
    unexplained: Vec<String>,
    e9_e10: certifier::E9E10Report,
}

fn corpus(a: &CorpusArgs) -> Result<Outcome> {
    let derived = algebra::derive_corpus()?;
    if let Some(p) = &a.derive_out {
        std::fs::write(p, algebra::write_corpus(derived.iter().map(|(k, v)| (k.as_str(), v))))?;
    }
    let comparisons = algebra::compare_with_transcription(&derived, a.points, a.seed)?;
    let mismatches = comparisons.iter().filter(|c| !c.exact_match).map(|c| c.name.clone()).collect();
    let unexplained: Vec<String> = comparisons.iter().filter(|c| !c.explained()).map(|c| c.name.clone()).collect();
    let e9_e10 = certifier::check_e9_e10(a.e9_grid)?;
    let outcome = if !unexplained.is_empty() {
        Outcome::CheckFailed(format!("unexplained disagreements: {}", unexplained.join(", ")))
    } else if !e9_e10.ok {
        Outcome::CheckFailed("e9/e10 checks failed".into())
    } else {
        Outcome::Ok
    };
    write_output(a.out.as_deref(), &json(&CorpusReport { comparisons, mismatches, unexplained, e9_e10 })?)?;
    Ok(outcome)
}

fn suite(a: &SuiteArgs) -> Result<Outcome> {
    let mut c = suite_defaults(&a.name)?;
    if let Some(v) = a.n {
        c.n = v;
    }
    if let Some(v) = a.p {
        c.p = v;
    }
    if let Some(v) = &a.dist {
        c.dist = Dist::parse(v)?;
    }
    if let Some(v) = a.steps {
        c.horizon = v;
    }
    if let Some(v) = a.runs {
        c.runs = v;
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = a.eps_class {
        c.eps_class = v;
    }
    let r = run_suite(&c)?;
    write_output(a.out.as_deref(), &json(&r)?)?;
    Ok(if r.pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed(format!("{}: {} (statistic {})", a.name, r.criterion, r.statistic))
    })
}

fn run<A: Serialize + Sync>(
    sub: &str,
    args: &A,
    common: &Common,
    out: Option<&Path>,
    body: fn(&A) -> Result<Outcome>,
) -> Result<Outcome> {
    let entries = config::manifest_entries(sub, args)?;
    let threads = common.threads.or_else(certifier::thread_budget_from_env);
    let outcome = certifier::with_threads(threads, || body(args))??;
    config::emit_manifest(&entries, out)?;
    Ok(outcome)
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Simulate(a) => run("simulate", a, &a.common, a.out.as_deref(), simulate),
        Cmd::Drift(a) => run("drift", a, &a.common, a.out.as_deref(), drift),
        Cmd::Certify(a) => run("certify", a, &a.common, a.out.as_deref(), certify),
        Cmd::CaseTable(a) => run("case-table", a, &a.common, a.out.as_deref(), case_table),
        Cmd::Lambda(a) => run("lambda", a, &a.common, a.out.as_deref(), lambda),
        Cmd::RulingK(a) => run("ruling-k", a, &a.common, None, ruling_k),
        Cmd::Corpus(a) => run("corpus", a, &a.common, a.out.as_deref(), corpus),
        Cmd::Suite(a) => run("suite", a, &a.common, a.out.as_deref(), suite),
        Cmd::Replay { .. } => unreachable!("replay is expanded before parsing"),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::expand_argv(&Cli::command(), argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("pcontest: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed(msg)) => {
            eprintln!("pcontest: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("pcontest: {e}");
            match e {
                Error::Usage(_) | Error::Domain(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
