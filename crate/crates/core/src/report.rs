//! Machine-readable outputs: CSV run summaries, the JSONL event log, the
//! `Λ` scan table and `key=value` manifests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lyapunov::{lambda_closed, lambda_quadrature};
use crate::process::TrajectorySummary;

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(";")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One row per run: seed, stream, horizon, steps, running min of
/// `x_(N-1)`, final core (`;`-separated), class and stop flags. Floats use
/// the shortest round-trip representation.
pub fn summary_csv(runs: &[TrajectorySummary]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "stream", "T", "steps", "min_xN1", "final_core", "class", "absorbed", "halted"])
        .map_err(csv_err)?;
    for r in runs {
        w.write_record([
            r.seed.to_string(),
            r.stream.to_string(),
            r.horizon.to_string(),
            r.steps_taken.to_string(),
            format!("{:?}", r.running_min),
            join(r.final_core.points()),
            r.class.label().to_string(),
            r.absorbed.to_string(),
            r.halted.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

#[derive(Serialize)]
struct EventLine<'a> {
    run: u64,
    #[serde(flatten)]
    record: &'a crate::process::EventRecord,
}

/// One JSON object per logged checkpoint event:
/// `{run, t, sampled, removed_tag, removed_value, tie, core}`.
pub fn events_jsonl(runs: &[TrajectorySummary]) -> Result<String> {
    let mut out = String::new();
    for r in runs {
        for e in &r.events {
            out.push_str(&serde_json::to_string(&EventLine { run: r.stream, record: e })?);
            out.push('\n');
        }
    }
    Ok(out)
}

/// `a, b, Λ_closed, Λ_quad` on the triangular grid `a = b·i/k`,
/// `b = j/(2k)` for `1 ≤ i ≤ k`, `1 ≤ j ≤ k`.
pub fn lambda_scan_csv(k: usize) -> Result<String> {
    if k == 0 {
        return Err(Error::Usage("scan size must be positive".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["a", "b", "lambda_closed", "lambda_quad"]).map_err(csv_err)?;
    for j in 1..=k {
        let b = j as f64 / (2.0 * k as f64);
        for i in 1..=k {
            let a = b * i as f64 / k as f64;
            let c = lambda_closed(a, b)?;
            let q = lambda_quadrature(a, b)?;
            w.write_record([format!("{a:?}"), format!("{b:?}"), format!("{c:?}"), format!("{q:?}")])
                .map_err(csv_err)?;
        }
    }
    finish(w)
}

/// `key=value` lines preceded by the crate version.
pub fn manifest(entries: &[(String, String)]) -> String {
    let mut out = format!("pcontest_version={}\n", env!("CARGO_PKG_VERSION"));
    for (k, v) in entries {
        out.push_str(&format!("{k}={v}\n"));
    }
    out
}
