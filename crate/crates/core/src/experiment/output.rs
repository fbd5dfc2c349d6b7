//! Result files: per-trial CSV, summary JSON, and a gnuplot table.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::sweep::{compare_to_limit, ComparisonRow, Manifest, PointSummary, SweepResult};
use crate::error::{Error, Result};
use crate::properties::hamilton::Verdict;

pub const CSV_HEADER: &str = "theorem,c,n,m,trial,seed,verdict,unknown_flag,elapsed_ms";

pub fn results_csv(result: &SweepResult) -> String {
    let cfg = &result.manifest.config;
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for point in &result.points {
        for t in &point.trials {
            let verdict = match t.verdict {
                Verdict::Yes => "yes",
                Verdict::No => "no",
                Verdict::Unknown => "unknown",
            };
            let elapsed = t.elapsed_ms.map(|e| e.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                cfg.theorem.tag(),
                point.summary.c,
                cfg.n,
                cfg.m,
                t.trial,
                t.seed,
                verdict,
                u8::from(t.verdict == Verdict::Unknown),
                elapsed
            )
            .expect("writing to a String");
        }
    }
    out
}

#[derive(Serialize)]
struct SummaryDocument<'a> {
    manifest: &'a Manifest,
    points: Vec<&'a PointSummary>,
    comparison: Vec<ComparisonRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aborted: Option<&'a str>,
}

pub fn summary_json(result: &SweepResult) -> String {
    let doc = SummaryDocument {
        manifest: &result.manifest,
        points: result.points.iter().map(|p| &p.summary).collect(),
        comparison: compare_to_limit(result),
        aborted: result.aborted.as_deref(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
    s.push('\n');
    s
}

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "NaN".into())
}

/// Whitespace-separated `c empirical predicted lo hi` rows.
pub fn limit_table(result: &SweepResult) -> String {
    let mut out = String::from("# c empirical predicted wilson_lo wilson_hi\n");
    for row in compare_to_limit(result) {
        writeln!(
            out,
            "{} {} {} {} {}",
            row.c,
            num(row.empirical),
            num(row.predicted),
            row.interval.lo,
            row.interval.hi
        )
        .expect("writing to a String");
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

/// Writes `results.csv`, `summary.json` and `limit_table.dat` into `dir`.
pub fn emit_outputs(result: &SweepResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir, "results.csv", &results_csv(result))?;
    write(dir, "summary.json", &summary_json(result))?;
    write(dir, "limit_table.dat", &limit_table(result))
}
